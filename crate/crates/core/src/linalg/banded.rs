//! Banded Hermitian storage and an unpivoted LDL^H factorization.
//!
//! The factorization serves two purposes: eigenvalue counting through matrix
//! inertia (Sylvester's law: the number of negative pivots of `H - sigma I`
//! equals the number of eigenvalues below sigma) and the inner solves of the
//! shift-invert Lanczos iteration. Nearest-neighbor grid operators have
//! bandwidth `n^(d-1)`, so the factorization costs `O(dim * bandwidth^2)`.

use num_complex::Complex64;

use crate::operator::HermitianOperator;

/// Relative pivot threshold below which the factorization reports breakdown.
const PIVOT_TOL: f64 = 1e-14;

/// Lower-triangle band storage: `data[off * dim + col] = A[col + off, col]`
/// for `off in 0..=bandwidth`.
#[derive(Debug, Clone)]
pub struct BandedHermitian {
    dim: usize,
    bandwidth: usize,
    data: Vec<Complex64>,
}

/// Unit-lower factor and real pivot vector of `A = L D L^H`.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    dim: usize,
    bandwidth: usize,
    lower: Vec<Complex64>,
    pivots: Vec<f64>,
}

/// Index of the pivot where an LDL^H factorization broke down.
#[derive(Debug, Clone, Copy)]
pub struct Breakdown(pub usize);

impl BandedHermitian {
    /// Band copy of `H - shift * I`.
    pub fn from_operator(op: &HermitianOperator, shift: f64) -> Self {
        let dim = op.dim();
        let bandwidth = op.bandwidth();
        let mut data = vec![Complex64::new(0.0, 0.0); (bandwidth + 1) * dim];
        for &(i, j, v) in op.entries() {
            // stored upper triangle (i <= j); the lower element is conj(v)
            let off = (j - i) as usize;
            data[off * dim + i as usize] += if off == 0 { v } else { v.conj() };
        }
        for i in 0..dim {
            data[i] -= Complex64::new(shift, 0.0);
        }
        Self { dim, bandwidth, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unpivoted banded LDL^H. Fails with the pivot index when a pivot falls
    /// below `PIVOT_TOL * scale`; callers perturb the shift and retry.
    pub fn ldl(mut self, scale: f64) -> Result<LdlFactor, Breakdown> {
        let n = self.dim;
        let b = self.bandwidth;
        let tiny = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        let mut pivots = vec![0.0f64; n];

        for j in 0..n {
            let k_lo = j.saturating_sub(b);
            // d_j = A[j,j] - sum_k |L[j,k]|^2 d_k
            let mut d = self.data[j].re;
            for k in k_lo..j {
                let l_jk = self.data[(j - k) * n + k];
                d -= l_jk.norm_sqr() * pivots[k];
            }
            if d.abs() <= tiny {
                return Err(Breakdown(j));
            }
            pivots[j] = d;

            let i_hi = (j + b).min(n - 1);
            for i in (j + 1)..=i_hi {
                let mut s = self.data[(i - j) * n + j];
                for k in i.saturating_sub(b)..j {
                    let l_ik = self.data[(i - k) * n + k];
                    let l_jk = self.data[(j - k) * n + k];
                    s -= l_ik * l_jk.conj() * Complex64::new(pivots[k], 0.0);
                }
                self.data[(i - j) * n + j] = s / d;
            }
        }

        Ok(LdlFactor { dim: n, bandwidth: b, lower: self.data, pivots })
    }
}

impl LdlFactor {
    /// Number of negative pivots = number of eigenvalues of A below zero.
    pub fn negative_count(&self) -> usize {
        self.pivots.iter().filter(|&&d| d < 0.0).count()
    }

    /// Solve `L D L^H x = rhs` in place.
    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let n = self.dim;
        let b = self.bandwidth;
        debug_assert_eq!(x.len(), n);
        // forward: L y = rhs (unit diagonal)
        for j in 0..n {
            let xj = x[j];
            let i_hi = (j + b).min(n - 1);
            for i in (j + 1)..=i_hi {
                let l_ij = self.lower[(i - j) * n + j];
                x[i] -= l_ij * xj;
            }
        }
        // diagonal
        for j in 0..n {
            x[j] /= self.pivots[j];
        }
        // backward: L^H z = y
        for j in (0..n).rev() {
            let i_hi = (j + b).min(n - 1);
            let mut s = x[j];
            for i in (j + 1)..=i_hi {
                let l_ij = self.lower[(i - j) * n + j];
                s -= l_ij.conj() * x[i];
            }
            x[j] = s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_operator(dim: usize, bandwidth: usize, seed: u64) -> HermitianOperator {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::new();
        for i in 0..dim {
            entries.push((i as u32, i as u32, Complex64::new(rng.gen_range(-2.0..2.0), 0.0)));
            for off in 1..=bandwidth {
                if i + off < dim && rng.gen_bool(0.8) {
                    entries.push((
                        i as u32,
                        (i + off) as u32,
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    ));
                }
            }
        }
        HermitianOperator::from_triplets(dim, entries)
    }

    #[test]
    fn inertia_counts_match_dense_eigenvalues() {
        for seed in 0..20 {
            let op = random_operator(40, 3, seed);
            let dense = op.to_dense();
            let mut eigs: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
            eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for &sigma in &[-3.0, -0.5, 0.0, 0.7, 2.5] {
                let expected = eigs.iter().filter(|&&e| e < sigma).count();
                let factor = BandedHermitian::from_operator(&op, sigma)
                    .ldl(op.norm_scale())
                    .expect("no breakdown for generic shift");
                assert_eq!(factor.negative_count(), expected, "seed {seed} sigma {sigma}");
            }
        }
    }

    #[test]
    fn solve_inverts_the_matrix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let op = random_operator(30, 2, 99);
        // shift far below the spectrum makes the matrix definite
        let (lo, _) = op.gershgorin_bounds();
        let shift = lo - 1.0;
        let factor = BandedHermitian::from_operator(&op, shift).ldl(op.norm_scale()).unwrap();
        let x: Vec<Complex64> =
            (0..op.dim()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let mut y = x.clone();
        factor.solve_in_place(&mut y);
        // multiply back: (H - shift) y should equal x
        let mut hy = vec![Complex64::new(0.0, 0.0); op.dim()];
        op.matvec(&y, &mut hy);
        for i in 0..op.dim() {
            let back = hy[i] - Complex64::new(shift, 0.0) * y[i];
            assert!((back - x[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn breakdown_reports_pivot_index() {
        // 2x2 with a zero leading pivot after shift
        let op = HermitianOperator::from_triplets(
            2,
            vec![
                (0, 0, Complex64::new(1.0, 0.0)),
                (0, 1, Complex64::new(1.0, 0.0)),
                (1, 1, Complex64::new(1.0, 0.0)),
            ],
        );
        let res = BandedHermitian::from_operator(&op, 1.0).ldl(1.0);
        assert!(matches!(res, Err(Breakdown(0))));
    }
}
