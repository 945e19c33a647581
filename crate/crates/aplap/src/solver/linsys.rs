//! Banded symmetric positive definite systems.
//!
//! Lexicographic node numbering on structured meshes keeps the stiffness
//! bandwidth at one grid row, so a dense-band Cholesky factorization is both
//! simple and fast at the mesh sizes used here, and bit-deterministic.

/// Symmetric banded matrix, lower band stored row-major:
/// entry `(i, j)` with `i - bw <= j <= i` lives at `data[i*(bw+1) + bw - i + j]`.
#[derive(Debug, Clone)]
pub struct BandedSpd {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotSpd {
    pub row: usize,
}

impl BandedSpd {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSpd { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + self.bw - i + j
    }

    /// Accumulate into the symmetric entry `(i, j)` (either triangle).
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(r, c);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bw {
            return 0.0;
        }
        self.data[self.idx(r, c)]
    }

    /// `y = A x` (for residual checks).
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            for j in j0..=i {
                let v = self.data[self.idx(i, j)];
                y[i] += v * x[j];
                if j < i {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }

    /// In-place banded Cholesky `A = L L^T`. Fails on a nonpositive pivot.
    pub fn cholesky(mut self) -> Result<BandedCholesky, NotSpd> {
        let bw = self.bw;
        for i in 0..self.n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j.saturating_sub(bw).max(j0);
                let mut sum = self.data[self.idx(i, j)];
                for k in k0..j {
                    sum -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                if j < i {
                    let d = self.data[self.idx(j, j)];
                    self.data[i * (bw + 1) + bw - i + j] = sum / d;
                } else {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(NotSpd { row: i });
                    }
                    self.data[i * (bw + 1) + bw] = sum.sqrt();
                }
            }
        }
        Ok(BandedCholesky { n: self.n, bw, data: self.data })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + self.bw - i + j
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        // Forward: L y = b.
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let mut s = x[i];
            for j in j0..i {
                s -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        // Backward: L^T x = y.
        for i in (0..self.n).rev() {
            let mut s = x[i];
            let hi = (i + self.bw).min(self.n - 1);
            for j in i + 1..=hi {
                s -= self.data[self.idx(j, i)] * x[j];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal_laplacian() {
        let n = 50;
        let mut a = BandedSpd::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i + 1, i, -1.0);
            }
        }
        let b = vec![1.0; n];
        let chol = a.clone().cholesky().unwrap();
        let x = chol.solve(&b);
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-10);
        }
    }

    #[test]
    fn random_spd_system() {
        // A = B B^T + I restricted to a band, via a seeded band matrix.
        let n = 40;
        let bw = 5;
        let mut a = BandedSpd::zeros(n, bw);
        let mut state = 1234567u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        };
        for i in 0..n {
            a.add(i, i, 4.0 + rnd().abs());
            for j in i.saturating_sub(bw)..i {
                a.add(i, j, 0.3 * rnd());
            }
        }
        let b: Vec<f64> = (0..n).map(|_| rnd()).collect();
        let x = a.clone().cholesky().unwrap().solve(&b);
        let r = a.mul_vec(&x);
        let scale = b.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-11 * (1.0 + scale));
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = BandedSpd::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, -2.0);
        a.add(2, 2, 1.0);
        assert!(a.cholesky().is_err());
    }
}
