use crate::error::{Error, Result};

/// Symmetric positive definite matrix in lower band storage:
/// `band[i][k]` holds `A[i][i - k]` for `k = 0..=bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBand {
    n: usize,
    bandwidth: usize,
    band: Vec<f64>,
}

impl SymmetricBand {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bandwidth,
            band: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, k: usize) -> usize {
        i * (self.bandwidth + 1) + k
    }

    /// Add `v` to `A[i][j]` (and its mirror); requires `j <= i`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        let at = self.idx(i, i - j);
        self.band[at] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.band[self.idx(i, i - j)]
        }
    }

    /// In-place Cholesky factorization `A = L L^T`, `O(n b^2)` operations.
    pub fn factorize(mut self) -> Result<BandCholesky> {
        let b = self.bandwidth;
        for i in 0..self.n {
            let lo = i.saturating_sub(b);
            for j in lo..=i {
                let mut sum = self.band[self.idx(i, i - j)];
                let kmin = lo.max(j.saturating_sub(b));
                for k in kmin..j {
                    sum -= self.band[self.idx(i, i - k)] * self.band[self.idx(j, j - k)];
                }
                if j == i {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(Error::SingularSystem { row: i, pivot: sum });
                    }
                    let at = self.idx(i, 0);
                    self.band[at] = sum.sqrt();
                } else {
                    let at = self.idx(i, i - j);
                    self.band[at] = sum / self.band[self.idx(j, 0)];
                }
            }
        }
        Ok(BandCholesky { factor: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    factor: SymmetricBand,
}

impl BandCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let l = &self.factor;
        let (n, b) = (l.n, l.bandwidth);
        let mut x = rhs.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(b)..i {
                s -= l.band[l.idx(i, i - k)] * x[k];
            }
            x[i] = s / l.band[l.idx(i, 0)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + b + 1).min(n) {
                s -= l.band[l.idx(k, k - i)] * x[k];
            }
            x[i] = s / l.band[l.idx(i, 0)];
        }
        x
    }
}
