use gensob::disk::{
    apriori_sweep, decay_profile, harmonic_residual, particular_residual, snorm, solve_dirichlet,
    uniform_convergence_experiment,
};
use gensob::noise::{covariance_check_seeds, regularity_sweep_multi, sample_white_noise};
use gensob::spectra::{embedding_ratio_sweep, frequency, halpha_weights, interp_weights, weighted_norm, SpectralField};
use gensob::weights::{
    check_or_window, embed_hormander, embed_nikolskii, eta_construct, eta_identity_error, indices, interp_param,
    OrGrid, Verdict, Window,
};
use gensob::WeightExpr;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::*;
use crate::error::CliError;
use crate::report::{num, opt, Check, Outcome, Table};

pub fn run(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    use ExperimentConfig::*;
    match config {
        WeightsIndices(c) => weights_indices(c),
        WeightsOrCheck(c) => weights_or_check(c),
        InterpVerify(c) => interp_verify(c),
        EtaVerify(c) => eta_verify(c),
        EmbedHormander(c) => hormander(c),
        EmbedNikolskii(c) => nikolskii(c),
        EmbeddingRatio(c) => embedding_ratio(c),
        NoiseCovariance(c) => noise_covariance(c),
        NoiseRegularity(c) => noise_regularity(c),
        DiskSolve(c) => disk_solve(c),
        DiskApriori(c) => disk_apriori(c),
        DiskConvergence(c) => disk_convergence(c),
    }
}

fn weights_indices(c: &IndicesConfig) -> Result<Outcome, CliError> {
    let window = Window::new(c.window[0], c.window[1])?;
    let mut checks = Vec::new();
    let mut table = Table::new(&["name", "sigma0_sym", "sigma1_sym", "sigma0_win", "sigma1_win"]);
    let mut results = Vec::new();
    for case in &c.weights {
        case.alpha.validate()?;
        let est = indices(&case.alpha, window, c.lambda_max)?;
        if let Some(exp) = &case.expected {
            let exact = est.sigma0_sym == Some(exp.sigma0) && est.sigma1_sym == Some(exp.sigma1);
            checks.push(Check::new(
                format!("{}: symbolic indices", case.name),
                exact,
                format!("got ({}, {}), expected ({}, {})", opt(est.sigma0_sym), opt(est.sigma1_sym), num(exp.sigma0), num(exp.sigma1)),
            ));
            if let Some(tol) = case.window_tol {
                let dev = (est.sigma0_win - exp.sigma0).abs().max((est.sigma1_win - exp.sigma1).abs());
                checks.push(Check::new(
                    format!("{}: window estimate", case.name),
                    dev <= tol,
                    format!("max deviation {} (tolerance {})", num(dev), num(tol)),
                ));
            }
        }
        table.push(vec![
            case.name.clone(),
            opt(est.sigma0_sym),
            opt(est.sigma1_sym),
            num(est.sigma0_win),
            num(est.sigma1_win),
        ]);
        results.push(json!({ "name": case.name, "estimate": est }));
    }
    Ok(Outcome { results: json!({ "weights": results }), checks, table })
}

fn weights_or_check(c: &OrCheckConfig) -> Result<Outcome, CliError> {
    c.alpha.validate()?;
    let d = OrGrid::default();
    let grid = OrGrid {
        t_max: c.t_max.unwrap_or(d.t_max),
        t_points: c.t_points.unwrap_or(d.t_points),
        lambda_points: c.lambda_points.unwrap_or(d.lambda_points),
        c_limit: c.c_limit,
    };
    let r = check_or_window(&c.alpha, c.b, grid)?;
    let mut table = Table::new(&["b", "c_est", "pass"]);
    table.push(vec![num(r.b), num(r.c_est), r.pass.to_string()]);
    let checks = vec![Check::new("OR window bound", r.pass, format!("c_est = {}", num(r.c_est)))];
    Ok(Outcome { results: json!(r), checks, table })
}

fn interp_verify(c: &InterpConfig) -> Result<Outcome, CliError> {
    let seeds = seeds(c.seed_base, c.n_fields);
    if seeds.is_empty() {
        return Err(CliError::Config("n_fields must be positive".into()));
    }
    let mut checks = Vec::new();
    let mut table = Table::new(&["case", "dim", "N", "fields", "max_rel_err"]);
    let mut results = Vec::new();
    for (ci, case) in c.cases.iter().enumerate() {
        case.alpha.validate()?;
        let psi = interp_param(&case.alpha, case.r0, case.r1)?;
        for g in &c.grids {
            SpectralField::zeros(g.dim, g.n)?;
            let hw = halpha_weights(g.dim, g.n, &case.alpha);
            let iw = interp_weights(g.dim, g.n, case.r0, case.r1, &psi);
            let errs: Vec<f64> = seeds
                .par_iter()
                .map(|&s| {
                    let f = sample_white_noise(g.dim, g.n, s)?.field;
                    let h = weighted_norm(&f, &hw);
                    Ok((weighted_norm(&f, &iw) - h).abs() / h)
                })
                .collect::<Result<_, CliError>>()?;
            let worst = errs.iter().cloned().fold(0.0, f64::max);
            checks.push(Check::new(
                format!("case {ci}, dim {}, N {}", g.dim, g.n),
                worst <= c.tol,
                format!("max relative error {} (tolerance {})", num(worst), num(c.tol)),
            ));
            table.push(vec![ci.to_string(), g.dim.to_string(), g.n.to_string(), seeds.len().to_string(), num(worst)]);
            results.push(json!({ "case": ci, "dim": g.dim, "n": g.n, "psi": psi, "max_rel_err": worst }));
        }
    }
    Ok(Outcome { results: json!({ "rows": results, "seeds": seeds }), checks, table })
}

fn eta_verify(c: &EtaConfig) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let mut table = Table::new(&["tuple", "branch", "theta", "max_rel_err"]);
    let mut results = Vec::new();
    for (i, t) in c.tuples.iter().enumerate() {
        t.phi.validate()?;
        let eta = eta_construct(&t.phi, t.s0, t.s1, t.lambda)?;
        let err = eta_identity_error(&t.phi, t.s0, t.s1, t.lambda, t.two_q, c.t_max, c.points)?;
        let branch = serde_json::to_value(eta.branch)?;
        checks.push(Check::new(
            format!("tuple {i}"),
            err <= c.tol,
            format!("max relative error {} (tolerance {})", num(err), num(c.tol)),
        ));
        table.push(vec![i.to_string(), branch.as_str().unwrap_or_default().to_string(), opt(eta.theta), num(err)]);
        results.push(json!({ "tuple": i, "construction": eta, "max_rel_err": err }));
    }
    Ok(Outcome { results: json!({ "tuples": results }), checks, table })
}

fn verdict_check(verdict: Verdict, expect: Option<Verdict>) -> Check {
    match expect {
        Some(e) => Check::new("verdict", verdict == e, format!("got {verdict:?}, expected {e:?}")),
        None => Check::new("verdict decided", verdict != Verdict::Inconclusive, format!("{verdict:?}")),
    }
}

fn partial_sum_table(sums: &[(u64, f64)]) -> Table {
    let mut table = Table::new(&["k", "partial_sum"]);
    for &(k, s) in sums {
        table.push(vec![k.to_string(), num(s)]);
    }
    table
}

fn hormander(c: &HormanderConfig) -> Result<Outcome, CliError> {
    c.alpha.validate()?;
    let r = embed_hormander(&c.alpha, c.p, c.n, c.k_max)?;
    Ok(Outcome {
        checks: vec![verdict_check(r.verdict, c.expect)],
        table: partial_sum_table(&r.partial_sums),
        results: json!(r),
    })
}

fn nikolskii(c: &NikolskiiConfig) -> Result<Outcome, CliError> {
    c.alpha.validate()?;
    let r = embed_nikolskii(&c.alpha, c.s, c.k_max)?;
    Ok(Outcome {
        checks: vec![verdict_check(r.verdict(), c.expect)],
        table: partial_sum_table(&r.report.partial_sums),
        results: json!(r),
    })
}

fn embedding_ratio(c: &EmbeddingRatioConfig) -> Result<Outcome, CliError> {
    c.alpha.validate()?;
    if c.n_list.is_empty() {
        return Err(CliError::Config("n_list must be non-empty".into()));
    }
    let sweep = embedding_ratio_sweep(&c.alpha, c.s, &c.n_list, c.dim, c.slack, c.k_max)?;
    let mut table = Table::new(&["N", "ratio", "constant_bound", "verdict"]);
    for r in &sweep.rows {
        let v = serde_json::to_value(r.verdict)?;
        table.push(vec![r.n.to_string(), num(r.ratio), opt(r.constant_bound), v.as_str().unwrap_or_default().to_string()]);
    }
    let failing: Vec<String> = sweep.rows.iter().filter(|r| !r.verdict.is_pass()).map(|r| r.n.to_string()).collect();
    let mut checks = vec![Check::new(
        "row verdicts",
        failing.is_empty(),
        if failing.is_empty() { "all rows pass".to_string() } else { format!("failing N: {}", failing.join(", ")) },
    )];
    if let (Some(min), Verdict::Diverges) = (c.min_growth, sweep.embedding.verdict()) {
        let growth = sweep.rows.last().unwrap().ratio / sweep.rows[0].ratio;
        checks.push(Check::new(
            "ratio growth",
            growth >= min,
            format!("R(N_last)/R(N_first) = {} (required >= {})", num(growth), num(min)),
        ));
    }
    Ok(Outcome { results: json!(sweep), checks, table })
}

fn modes_field(dim: usize, n: usize, modes: &[FieldMode]) -> Result<SpectralField, CliError> {
    let zero = SpectralField::zeros(dim, n)?;
    let mut coeffs = zero.coeffs().to_vec();
    for m in modes {
        if m.k.len() != dim {
            return Err(CliError::Config(format!("mode {:?} needs {dim} frequency components", m.k)));
        }
        let (k1, k2) = (m.k[0], if dim == 2 { m.k[1] } else { 0 });
        let p = zero
            .index_of(k1, k2)
            .ok_or_else(|| CliError::Config(format!("mode {:?} outside the grid N = {n}", m.k)))?;
        coeffs[p] += Complex64::new(m.c[0], m.c[1]);
    }
    Ok(SpectralField::from_coeffs(dim, n, coeffs)?)
}

fn test_field(dim: usize, n: usize, spec: &TestField) -> Result<SpectralField, CliError> {
    match spec {
        TestField::Modes { modes } => modes_field(dim, n, modes),
        TestField::PowerProfile { exponent, twist } => {
            let zero = SpectralField::zeros(dim, n)?;
            let coeffs = (0..zero.len())
                .map(|p| {
                    let (k1, k2) = zero.freq(p);
                    let b2 = 1.0 + (k1 * k1 + k2 * k2) as f64;
                    Complex64::from_polar(b2.powf(-exponent / 2.0), twist * (k1 + k2) as f64)
                })
                .collect();
            Ok(SpectralField::from_coeffs(dim, n, coeffs)?)
        }
    }
}

fn noise_covariance(c: &CovarianceConfig) -> Result<Outcome, CliError> {
    let seeds = seeds(c.seed_base, c.n_samples);
    let mut checks = Vec::new();
    let mut table = Table::new(&["pair", "count", "empirical_re", "empirical_im", "expected_re", "expected_im", "z"]);
    let mut results = Vec::new();
    for (i, [a, b]) in c.pairs.iter().enumerate() {
        let v1 = test_field(c.dim, c.n, a)?;
        let v2 = test_field(c.dim, c.n, b)?;
        let r = covariance_check_seeds(c.dim, c.n, &seeds, &v1, &v2)?;
        checks.push(Check::new(
            format!("pair {i}"),
            r.z_score <= c.z_max,
            format!("z = {} (limit {})", num(r.z_score), num(c.z_max)),
        ));
        table.push(vec![
            i.to_string(),
            r.count.to_string(),
            num(r.empirical.re),
            num(r.empirical.im),
            num(r.expected.re),
            num(r.expected.im),
            num(r.z_score),
        ]);
        results.push(r);
    }
    Ok(Outcome { results: json!({ "pairs": results, "seeds": seeds }), checks, table })
}

fn noise_regularity(c: &RegularityConfig) -> Result<Outcome, CliError> {
    let seeds = seeds(c.seed_base, c.n_seeds);
    let sweeps = regularity_sweep_multi(c.dim, &c.s_list, &c.n_list, &seeds)?;
    let critical = -(c.dim as f64) / 2.0;
    let mut checks = Vec::new();
    let mut table = Table::new(&["dim", "s", "N", "seed_count", "median", "q25", "q75"]);
    for sw in &sweeps {
        if sw.s > critical + 1e-12 {
            let want = sw.predicted_growth();
            let got = sw.median_growth();
            let got_sq = sw.median_growth_sq();
            checks.push(Check::new(
                format!("s = {}: median growth", num(sw.s)),
                (got / want - 1.0).abs() <= c.growth_tol,
                format!("norm {} vs predicted {} (tolerance {})", num(got), num(want), num(c.growth_tol)),
            ));
            checks.push(Check::new(
                format!("s = {}: squared median growth", num(sw.s)),
                (got_sq / (want * want) - 1.0).abs() <= c.growth_tol,
                format!("squared norm {} vs predicted {}", num(got_sq), num(want * want)),
            ));
        } else {
            let spread = sw.median_spread();
            checks.push(Check::new(
                format!("s = {}: bounded medians", num(sw.s)),
                spread < c.max_spread,
                format!("max/min median {} (limit {})", num(spread), num(c.max_spread)),
            ));
        }
        for r in &sw.rows {
            table.push(vec![
                r.dim.to_string(),
                num(r.s),
                r.n.to_string(),
                r.seed_count.to_string(),
                num(r.median),
                num(r.q25),
                num(r.q75),
            ]);
        }
    }
    let rows: Vec<_> = sweeps.iter().flat_map(|s| s.rows.clone()).collect();
    Ok(Outcome { results: json!({ "rows": rows, "seeds": seeds }), checks, table })
}

fn boundary_field(spec: &BoundarySpec, alpha: &WeightExpr) -> Result<SpectralField, CliError> {
    Ok(match spec {
        BoundarySpec::WhiteNoise { n, seed } => sample_white_noise(1, *n, *seed)?.field,
        BoundarySpec::Modes { n, modes } => modes_field(1, *n, modes)?,
        BoundarySpec::Zeros { n } => SpectralField::zeros(1, *n)?,
        BoundarySpec::DecayProfile { n, extra } => decay_profile(alpha, *n, *extra)?,
    })
}

fn disk_solve(c: &DiskSolveConfig) -> Result<Outcome, CliError> {
    c.alpha.validate()?;
    let g = boundary_field(&c.boundary, &c.alpha)?;
    let u = solve_dirichlet(&c.sources, &g)?;
    let norms = snorm(&u, &c.alpha, c.lambda);
    let grid = c.residual;
    if grid.n_r < 2 || grid.n_theta < 1 || !(grid.h > 0.0) {
        return Err(CliError::Config("residual grid needs n_r >= 2, n_theta >= 1, h > 0".into()));
    }
    let trace_exact = u.trace(g.n())? == g;
    let h_res = harmonic_residual(&u, grid.r_max, grid.n_r, grid.n_theta, grid.h);
    let (p_res, f_max) = particular_residual(&u, grid.r_max, grid.n_r, grid.n_theta, grid.h);
    let mut checks = vec![
        Check::new("exact trace", trace_exact, "trace coefficients compared bit for bit"),
        Check::new(
            "harmonic residual",
            h_res <= c.harmonic_tol,
            format!("max |Lap u_h| = {} (tolerance {})", num(h_res), num(c.harmonic_tol)),
        ),
    ];
    if !c.sources.is_empty() {
        checks.push(Check::new(
            "particular residual",
            p_res <= c.particular_tol * f_max,
            format!("max |Lap u_p - f| = {} (tolerance {} x sup|f| = {})", num(p_res), num(c.particular_tol), num(f_max)),
        ));
    }
    let mut table = Table::new(&["k", "c_re", "c_im", "g_re", "g_im"]);
    let harmonic = u.boundary_coeffs.as_ref().expect("solve_dirichlet sets harmonic coefficients");
    let n = g.n() as i64;
    for k in (-n / 2 + 1)..=(n / 2) {
        let p = g.index_of(k, 0).expect("k within the grid");
        let (cc, gg) = (harmonic.coeffs()[p], g.coeffs()[p]);
        debug_assert_eq!(frequency(p, g.n()), k);
        table.push(vec![k.to_string(), num(cc.re), num(cc.im), num(gg.re), num(gg.im)]);
    }
    let results = json!({
        "norms": norms,
        "harmonic_residual": h_res,
        "particular_residual": p_res,
        "source_sup": f_max,
        "particular_terms": u.particular_terms,
    });
    Ok(Outcome { results, checks, table })
}

fn disk_apriori(c: &AprioriConfig) -> Result<Outcome, CliError> {
    c.alpha.validate()?;
    let seeds = seeds(c.seed_base, c.n_seeds);
    let sweep = apriori_sweep(&c.alpha, c.lambda, c.s, &c.sources, &c.n_list, &seeds)?;
    let mut table = Table::new(&["N", "seed", "ratio", "snorm", "source_norm", "boundary_norm"]);
    for r in &sweep.rows {
        table.push(vec![
            r.n.to_string(),
            r.seed.to_string(),
            num(r.ratio),
            num(r.snorm),
            num(r.source_norm),
            num(r.boundary_norm),
        ]);
    }
    let checks = vec![Check::new(
        "bounded ratios",
        sweep.growth <= c.max_growth,
        format!("max ratio at N_max / at N_min = {} (limit {})", num(sweep.growth), num(c.max_growth)),
    )];
    let results = json!({ "summaries": sweep.summaries, "growth": sweep.growth, "seeds": seeds });
    Ok(Outcome { results, checks, table })
}

fn disk_convergence(c: &ConvergenceConfig) -> Result<Outcome, CliError> {
    c.alpha.validate()?;
    let g = boundary_field(&c.boundary, &c.alpha)?;
    let t = uniform_convergence_experiment(&c.alpha, &g, &c.k_list, c.grid)?;
    let mut table = Table::new(&["K", "sup_error", "bound"]);
    for r in &t.rows {
        table.push(vec![r.k.to_string(), num(r.sup_error), num(r.bound)]);
    }
    let violated: Vec<String> = t.rows.iter().filter(|r| r.sup_error > r.bound).map(|r| r.k.to_string()).collect();
    let mut checks = vec![
        Check::new(
            "E(K) <= T(K)",
            violated.is_empty(),
            if violated.is_empty() { "holds for every K".to_string() } else { format!("violated at K = {}", violated.join(", ")) },
        ),
        Check::new(
            "E(K) nonincreasing",
            t.rows.windows(2).all(|w| w[1].sup_error <= w[0].sup_error),
            "along the K list",
        ),
    ];
    if let Some(max) = c.max_reduction {
        let red = t.reduction();
        checks.push(Check::new(
            "reduction",
            red <= max,
            format!("E(K_last)/E(K_first) = {} (required <= {})", num(red), num(max)),
        ));
    }
    Ok(Outcome { results: json!(t), checks, table })
}
