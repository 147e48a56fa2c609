use gensob::disk::{PolarGrid, SourceTerm};
use gensob::weights::{Verdict, DEFAULT_K_MAX};
use gensob::WeightExpr;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One experiment. The `command` key selects the variant; every variant
/// rejects unknown keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    WeightsIndices(IndicesConfig),
    WeightsOrCheck(OrCheckConfig),
    InterpVerify(InterpConfig),
    EtaVerify(EtaConfig),
    EmbedHormander(HormanderConfig),
    EmbedNikolskii(NikolskiiConfig),
    EmbeddingRatio(EmbeddingRatioConfig),
    NoiseCovariance(CovarianceConfig),
    NoiseRegularity(RegularityConfig),
    DiskSolve(DiskSolveConfig),
    DiskApriori(AprioriConfig),
    DiskConvergence(ConvergenceConfig),
}

pub const COMMANDS: [&str; 12] = [
    "weights-indices",
    "weights-or-check",
    "interp-verify",
    "eta-verify",
    "embed-hormander",
    "embed-nikolskii",
    "embedding-ratio",
    "noise-covariance",
    "noise-regularity",
    "disk-solve",
    "disk-apriori",
    "disk-convergence",
];

impl ExperimentConfig {
    /// Parses a config. `command` may come from the CLI instead of the file;
    /// if both are present they must agree.
    pub fn parse(text: &str, command: Option<&str>) -> Result<Self, CliError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
        match (obj.get("command"), command) {
            (None, None) => return Err(CliError::Config("config has no \"command\" key".into())),
            (None, Some(c)) => {
                obj.insert("command".into(), c.into());
            }
            (Some(found), Some(c)) if found != c => {
                return Err(CliError::Config(format!("config is for command {found}, but `{c}` was invoked")))
            }
            (Some(found), _) => {
                if !found.as_str().is_some_and(|f| COMMANDS.contains(&f)) {
                    return Err(CliError::Config(format!("unknown command {found}")));
                }
            }
        }
        serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn command(&self) -> &'static str {
        use ExperimentConfig::*;
        let i = match self {
            WeightsIndices(_) => 0,
            WeightsOrCheck(_) => 1,
            InterpVerify(_) => 2,
            EtaVerify(_) => 3,
            EmbedHormander(_) => 4,
            EmbedNikolskii(_) => 5,
            EmbeddingRatio(_) => 6,
            NoiseCovariance(_) => 7,
            NoiseRegularity(_) => 8,
            DiskSolve(_) => 9,
            DiskApriori(_) => 10,
            DiskConvergence(_) => 11,
        };
        COMMANDS[i]
    }

    /// Applies `--seed-base` to configs that draw seeds.
    pub fn set_seed_base(&mut self, base: u64) {
        use ExperimentConfig::*;
        match self {
            InterpVerify(c) => c.seed_base = base,
            NoiseCovariance(c) => c.seed_base = base,
            NoiseRegularity(c) => c.seed_base = base,
            DiskApriori(c) => c.seed_base = base,
            _ => {}
        }
    }
}

fn default_window() -> [f64; 2] {
    [1e10, 1e12]
}
fn default_lambda_max() -> f64 {
    10.0
}
fn default_k_max() -> u64 {
    DEFAULT_K_MAX
}
fn default_one() -> usize {
    1
}
fn default_interp_tol() -> f64 {
    1e-10
}
fn default_eta_tol() -> f64 {
    1e-12
}
fn default_t_max() -> f64 {
    1e8
}
fn default_points() -> usize {
    400
}
fn default_slack() -> f64 {
    0.1
}
fn default_z_max() -> f64 {
    3.0
}
fn default_spread() -> f64 {
    2.0
}
fn default_growth_tol() -> f64 {
    0.3
}
fn default_max_growth() -> f64 {
    1.5
}
fn default_harmonic_tol() -> f64 {
    1e-8
}
fn default_particular_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedIndices {
    pub sigma0: f64,
    pub sigma1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexCase {
    pub name: String,
    pub alpha: WeightExpr,
    #[serde(default)]
    pub expected: Option<ExpectedIndices>,
    /// Tolerance for the window estimates against `expected`; omitted means
    /// only the symbolic indices are checked.
    #[serde(default)]
    pub window_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicesConfig {
    pub weights: Vec<IndexCase>,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrCheckConfig {
    pub alpha: WeightExpr,
    pub b: f64,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub t_points: Option<usize>,
    #[serde(default)]
    pub lambda_points: Option<usize>,
    #[serde(default)]
    pub c_limit: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpCase {
    pub alpha: WeightExpr,
    pub r0: f64,
    pub r1: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpConfig {
    pub cases: Vec<InterpCase>,
    pub grids: Vec<GridSpec>,
    pub n_fields: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_interp_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaTuple {
    pub phi: WeightExpr,
    pub s0: f64,
    pub s1: f64,
    pub lambda: f64,
    #[serde(default)]
    pub two_q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaConfig {
    pub tuples: Vec<EtaTuple>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_eta_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HormanderConfig {
    pub alpha: WeightExpr,
    pub p: u32,
    pub n: u32,
    #[serde(default = "default_k_max")]
    pub k_max: u64,
    #[serde(default)]
    pub expect: Option<Verdict>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NikolskiiConfig {
    pub alpha: WeightExpr,
    pub s: f64,
    #[serde(default = "default_k_max")]
    pub k_max: u64,
    #[serde(default)]
    pub expect: Option<Verdict>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingRatioConfig {
    pub alpha: WeightExpr,
    pub s: f64,
    pub n_list: Vec<usize>,
    #[serde(default = "default_one")]
    pub dim: usize,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default = "default_k_max")]
    pub k_max: u64,
    /// For a divergent embedding: required `R(N_last) / R(N_first)`.
    #[serde(default)]
    pub min_growth: Option<f64>,
}

/// A mode `c e^{ik.x}`; `k` has one entry per dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMode {
    pub k: Vec<i64>,
    pub c: [f64; 2],
}

/// Deterministic test field for pairings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestField {
    Modes { modes: Vec<FieldMode> },
    /// `v_k = <k>^{-exponent} e^{i twist (k1 + k2)}`.
    PowerProfile {
        exponent: f64,
        #[serde(default)]
        twist: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceConfig {
    pub dim: usize,
    pub n: usize,
    pub n_samples: usize,
    #[serde(default)]
    pub seed_base: u64,
    pub pairs: Vec<[TestField; 2]>,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityConfig {
    pub dim: usize,
    pub s_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub n_seeds: usize,
    #[serde(default)]
    pub seed_base: u64,
    /// At `s = -dim/2`: largest/smallest median must stay below this.
    #[serde(default = "default_spread")]
    pub max_spread: f64,
    /// Above `s = -dim/2`: relative tolerance on the predicted median growth.
    #[serde(default = "default_growth_tol")]
    pub growth_tol: f64,
}

/// Boundary data on the circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    WhiteNoise { n: usize, seed: u64 },
    Modes { n: usize, modes: Vec<FieldMode> },
    Zeros { n: usize },
    /// `g_k = alpha^{-1}(<k>) <k>^{-1/2 - extra}` with the experiment's alpha.
    DecayProfile { n: usize, extra: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualGrid {
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub h: f64,
}

impl Default for ResidualGrid {
    fn default() -> Self {
        ResidualGrid { r_max: 0.95, n_r: 24, n_theta: 32, h: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSolveConfig {
    #[serde(default)]
    pub sources: Vec<SourceTerm>,
    pub boundary: BoundarySpec,
    pub alpha: WeightExpr,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub residual: ResidualGrid,
    #[serde(default = "default_harmonic_tol")]
    pub harmonic_tol: f64,
    #[serde(default = "default_particular_tol")]
    pub particular_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AprioriConfig {
    pub alpha: WeightExpr,
    pub lambda: f64,
    pub s: f64,
    #[serde(default)]
    pub sources: Vec<SourceTerm>,
    pub n_list: Vec<usize>,
    pub n_seeds: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_max_growth")]
    pub max_growth: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub alpha: WeightExpr,
    pub boundary: BoundarySpec,
    pub k_list: Vec<usize>,
    #[serde(default)]
    pub grid: PolarGrid,
    /// Required `E(K_last) / E(K_first)`.
    #[serde(default)]
    pub max_reduction: Option<f64>,
}

pub fn seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base + i).collect()
}
