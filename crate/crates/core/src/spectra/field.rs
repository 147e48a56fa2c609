use std::io::{BufRead, Write};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::SpectralError;

/// Fourier coefficients of a periodic field on `T^1` or `T^2`.
///
/// Storage is the DFT layout: along each axis, array index `i` holds the
/// frequency `i` for `i <= N/2` and `i - N` above, so the Nyquist mode is
/// `+N/2`. 2D fields are row-major (`i1 * N + i2`).
///
/// Normalization: the torus carries the normalized measure, so the mode
/// `e^{ik.x}` has coefficient 1 and Parseval reads
/// `sum |w_x|^2 / N^dim = sum |w_k|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    dim: usize,
    n: usize,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

/// Signed frequency of array index `i` along an axis of length `n`.
#[inline]
pub fn frequency(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Array index of the frequency `-k` along one axis.
#[inline]
fn negate_index(i: usize, n: usize) -> usize {
    (n - i) % n
}

pub(crate) fn check_shape(dim: usize, n: usize, min_n: usize) -> Result<usize, SpectralError> {
    if dim != 1 && dim != 2 {
        return Err(SpectralError::BadDimension(dim));
    }
    if n < min_n || !n.is_power_of_two() {
        return Err(SpectralError::BadTruncation(n, min_n));
    }
    Ok(n.pow(dim as u32))
}

impl SpectralField {
    /// Wraps coefficients in DFT layout. The hermitian flag is set iff the
    /// symmetry `w_{-k} = conj(w_k)` holds exactly.
    pub fn from_coeffs(dim: usize, n: usize, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        let len = check_shape(dim, n, 2)?;
        if coeffs.len() != len {
            return Err(SpectralError::SizeMismatch { expected: len, got: coeffs.len() });
        }
        let mut f = SpectralField { dim, n, coeffs, hermitian: false };
        f.hermitian = (0..len).all(|p| f.coeffs[f.partner(p)] == f.coeffs[p].conj());
        Ok(f)
    }

    /// Zero field.
    pub fn zeros(dim: usize, n: usize) -> Result<Self, SpectralError> {
        let len = check_shape(dim, n, 2)?;
        Ok(SpectralField { dim, n, coeffs: vec![Complex64::new(0.0, 0.0); len], hermitian: true })
    }

    /// Forward transform of grid samples `w(2 pi j / N)`.
    ///
    /// Real-valued samples yield a hermitian field; the symmetry is imposed
    /// exactly by averaging each coefficient with its conjugate partner.
    pub fn from_samples(dim: usize, n: usize, samples: &[Complex64]) -> Result<Self, SpectralError> {
        let len = check_shape(dim, n, 2)?;
        if samples.len() != len {
            return Err(SpectralError::SizeMismatch { expected: len, got: samples.len() });
        }
        let real = samples.iter().all(|z| z.im == 0.0);
        let mut coeffs = samples.to_vec();
        fft_nd(&mut coeffs, dim, n, FftDirection::Forward);
        let scale = 1.0 / len as f64;
        coeffs.iter_mut().for_each(|c| *c *= scale);
        let mut f = SpectralField { dim, n, coeffs, hermitian: false };
        if real {
            f.symmetrize();
        } else {
            f.hermitian = (0..len).all(|p| f.coeffs[f.partner(p)] == f.coeffs[p].conj());
        }
        Ok(f)
    }

    pub fn from_real_samples(dim: usize, n: usize, samples: &[f64]) -> Result<Self, SpectralError> {
        let z: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_samples(dim, n, &z)
    }

    /// Inverse transform back to grid samples.
    pub fn to_samples(&self) -> Vec<Complex64> {
        let mut out = self.coeffs.clone();
        fft_nd(&mut out, self.dim, self.n, FftDirection::Inverse);
        out
    }

    /// Replaces the coefficients by their hermitian part `(w_k + conj w_{-k})/2`,
    /// which is symmetric in exact arithmetic and in floating point alike.
    pub fn symmetrize(&mut self) {
        let old = self.coeffs.clone();
        for p in 0..old.len() {
            let q = self.partner(p);
            self.coeffs[p] = (old[p] + old[q].conj()) * 0.5;
        }
        self.hermitian = true;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Frequency vector of flat index `p` (second entry 0 in 1D).
    pub fn freq(&self, p: usize) -> (i64, i64) {
        freq_of(self.dim, self.n, p)
    }

    /// Flat index of the frequency `(k1, k2)`, if stored.
    pub fn index_of(&self, k1: i64, k2: i64) -> Option<usize> {
        let n = self.n as i64;
        let axis = |k: i64| -> Option<usize> {
            if k > n / 2 || k <= -n / 2 {
                None
            } else {
                Some(k.rem_euclid(n) as usize)
            }
        };
        match self.dim {
            1 if k2 == 0 => axis(k1),
            2 => Some(axis(k1)? * self.n + axis(k2)?),
            _ => None,
        }
    }

    /// Coefficient at frequency `(k1, k2)`, zero if out of range.
    pub fn coeff_at(&self, k1: i64, k2: i64) -> Complex64 {
        self.index_of(k1, k2).map_or(Complex64::new(0.0, 0.0), |p| self.coeffs[p])
    }

    /// Flat index of the conjugate partner `-k`.
    pub fn partner(&self, p: usize) -> usize {
        match self.dim {
            1 => negate_index(p, self.n),
            _ => {
                let (i1, i2) = (p / self.n, p % self.n);
                negate_index(i1, self.n) * self.n + negate_index(i2, self.n)
            }
        }
    }

    /// `sum |w_k|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum conj(self_k) other_k`: the `L2` inner product with the normalized
    /// measure, conjugate-linear in `self`.
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        assert_eq!((self.dim, self.n), (other.dim, other.n), "inner product of fields on different grids");
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    /// Coefficients with `|k_i| <= k_max` on every axis, others zeroed.
    pub fn truncated(&self, k_max: i64) -> SpectralField {
        let mut out = self.clone();
        for p in 0..out.coeffs.len() {
            let (k1, k2) = self.freq(p);
            if k1.abs() > k_max || k2.abs() > k_max {
                out.coeffs[p] = Complex64::new(0.0, 0.0);
            }
        }
        // a self-conjugate Nyquist mode may now lose its partner; recheck
        out.hermitian = (0..out.coeffs.len()).all(|p| out.coeffs[out.partner(p)] == out.coeffs[p].conj());
        out
    }

    /// Writes the metadata line followed by the little-endian coefficient blob.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), SpectralError> {
        let header = FieldHeader {
            format: FORMAT_TAG.into(),
            version: 1,
            dim: self.dim,
            n: self.n,
            hermitian: self.hermitian,
            count: self.coeffs.len(),
            dtype: DTYPE.into(),
        };
        let line = serde_json::to_string(&header).map_err(|e| SpectralError::Encoding(e.to_string()))?;
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
        for c in &self.coeffs {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self, SpectralError> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: FieldHeader =
            serde_json::from_str(line.trim_end()).map_err(|e| SpectralError::Encoding(e.to_string()))?;
        if header.format != FORMAT_TAG || header.version != 1 || header.dtype != DTYPE {
            return Err(SpectralError::Encoding(format!(
                "unsupported field header: {} v{} {}",
                header.format, header.version, header.dtype
            )));
        }
        let len = check_shape(header.dim, header.n, 2)?;
        if header.count != len {
            return Err(SpectralError::SizeMismatch { expected: len, got: header.count });
        }
        let mut buf = vec![0u8; 16 * len];
        r.read_exact(&mut buf)?;
        let coeffs: Vec<Complex64> = buf
            .chunks_exact(16)
            .map(|b| {
                let re = f64::from_le_bytes(b[..8].try_into().unwrap());
                let im = f64::from_le_bytes(b[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        let f = SpectralField::from_coeffs(header.dim, header.n, coeffs)?;
        if header.hermitian && !f.hermitian {
            return Err(SpectralError::Encoding("header claims hermitian symmetry the data lacks".into()));
        }
        Ok(f)
    }
}

const FORMAT_TAG: &str = "gensob-field";
const DTYPE: &str = "complex64-f64pair-le";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldHeader {
    format: String,
    version: u32,
    dim: usize,
    n: usize,
    hermitian: bool,
    count: usize,
    dtype: String,
}

pub(crate) fn freq_of(dim: usize, n: usize, p: usize) -> (i64, i64) {
    match dim {
        1 => (frequency(p, n), 0),
        _ => (frequency(p / n, n), frequency(p % n, n)),
    }
}

/// Unnormalized in-place DFT along every axis.
fn fft_nd(data: &mut [Complex64], dim: usize, n: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    // rows (and the whole signal in 1D)
    fft.process(data);
    if dim == 2 {
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = data[i * n + j];
            }
            fft.process(&mut col);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
    }
}
