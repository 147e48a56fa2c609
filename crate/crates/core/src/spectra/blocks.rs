use super::field::{check_shape, freq_of};
use crate::error::SpectralError;

/// Partition of the stored frequencies into `Q_0 = {|k| <= 1}` and
/// `Q_j = {2^{j-1} < |k| <= 2^j}`.
///
/// Membership is decided on the integer `|k|^2`, so block edges are exact.
/// In 2D the corner frequencies beyond `N/2` fall into a last, partially
/// filled block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicBlocks {
    dim: usize,
    n: usize,
    block_of: Vec<u32>,
    members: Vec<Vec<usize>>,
}

/// Block index of a frequency with squared length `k2`.
pub fn block_index(k2: u64) -> u32 {
    if k2 <= 1 {
        return 0;
    }
    let mut j = 1;
    while k2 > 1u64 << (2 * j) {
        j += 1;
    }
    j
}

impl DyadicBlocks {
    pub fn new(dim: usize, n: usize) -> Result<Self, SpectralError> {
        let len = check_shape(dim, n, 2)?;
        let block_of: Vec<u32> = (0..len)
            .map(|p| {
                let (a, b) = freq_of(dim, n, p);
                block_index((a * a + b * b) as u64)
            })
            .collect();
        let count = *block_of.iter().max().unwrap() as usize + 1;
        let mut members = vec![Vec::new(); count];
        for (p, &j) in block_of.iter().enumerate() {
            members[j as usize].push(p);
        }
        Ok(DyadicBlocks { dim, n, block_of, members })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.members.len()
    }

    pub fn block_of(&self, p: usize) -> u32 {
        self.block_of[p]
    }

    pub fn members(&self, j: usize) -> &[usize] {
        &self.members[j]
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// `sum_{Q_j} |w_k|^2` for every block.
    pub fn energies(&self, coeffs: &[num_complex::Complex64]) -> Vec<f64> {
        let mut e = vec![0.0; self.members.len()];
        for (c, &j) in coeffs.iter().zip(&self.block_of) {
            e[j as usize] += c.norm_sqr();
        }
        e
    }
}
