//! Eigenvalues, eigenvalue counts `Tr χ_[a,b](H)`, ground energies, and
//! eigenfunction mass on regions.
//!
//! Counting goes through two independent routes: a dense eigendecomposition
//! and matrix inertia via the banded LDL^H factorization. The inertia route
//! is the production path for counting; the dense route is the oracle it is
//! tested against.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::banded::BandedHermitian;
use crate::linalg::smallest_eigenpairs_shift_invert;
use crate::operator::HermitianOperator;

/// Crossover between the dense and shift-invert solver paths.
pub const DENSE_EIGEN_LIMIT: usize = 4096;

/// Closed energy interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub lower: f64,
    pub upper: f64,
}

impl SpectralWindow {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) {
            return Err(Error::EmptyWindow(format!("[{lower}, {upper}]")));
        }
        Ok(Self { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lower <= e && e <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Dense,
    Inertia,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HowMany {
    All,
    Smallest(usize),
}

/// Eigenvalue report with provenance. `count_in_window` is filled when a
/// window is attached and the listed eigenvalues cover it.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<DVector<Complex64>>>,
    pub count_in_window: Option<usize>,
    pub window: Option<SpectralWindow>,
    pub method: SolveMethod,
    pub residual_bound: f64,
}

impl SpectralReport {
    pub fn with_window(mut self, window: SpectralWindow) -> Self {
        let count = self.eigenvalues.iter().filter(|&&e| window.contains(e)).count();
        self.window = Some(window);
        self.count_in_window = Some(count);
        self
    }
}

fn sorted_dense_eigenvalues(op: &HermitianOperator) -> Vec<f64> {
    let mut vals: Vec<f64> = if op.is_real() {
        op.to_dense_real().symmetric_eigenvalues().iter().copied().collect()
    } else {
        op.to_dense().symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// All eigenvalues, ascending. Dense path; no eigenvectors are formed.
pub fn eigenvalues(op: &HermitianOperator) -> Vec<f64> {
    sorted_dense_eigenvalues(op)
}

fn dense_eigenpairs(op: &HermitianOperator) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let n = op.dim();
    let (vals, cols): (Vec<f64>, Vec<DVector<Complex64>>) = if op.is_real() {
        let se = nalgebra::SymmetricEigen::new(op.to_dense_real());
        let vectors: Vec<DVector<Complex64>> = (0..n)
            .map(|j| {
                DVector::from_fn(n, |i, _| Complex64::new(se.eigenvectors[(i, j)], 0.0))
            })
            .collect();
        (se.eigenvalues.iter().copied().collect(), vectors)
    } else {
        let se = nalgebra::SymmetricEigen::new(op.to_dense());
        let vectors: Vec<DVector<Complex64>> =
            (0..n).map(|j| se.eigenvectors.column(j).clone_owned()).collect();
        (se.eigenvalues.iter().copied().collect(), vectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs: Vec<DVector<Complex64>> = order.iter().map(|&i| cols[i].clone()).collect();
    (sorted_vals, sorted_vecs)
}

fn measured_residual(
    op: &HermitianOperator,
    vals: &[f64],
    vecs: &[DVector<Complex64>],
) -> f64 {
    let mut hx = vec![Complex64::new(0.0, 0.0); op.dim()];
    let mut worst = 0.0f64;
    for (mu, x) in vals.iter().zip(vecs) {
        op.matvec(x.as_slice(), &mut hx);
        let mut r2 = 0.0;
        for i in 0..op.dim() {
            r2 += (hx[i] - Complex64::new(*mu, 0.0) * x[i]).norm_sqr();
        }
        worst = worst.max(r2.sqrt());
    }
    worst
}

/// Smallest `how_many` eigenvalues, values only. Dense up to
/// [`DENSE_EIGEN_LIMIT`]; `Smallest(k)` switches to shift-invert Lanczos
/// above it (`All` stays dense at any size). The residual bound on the
/// dense values-only path is the backward-error estimate of the solver.
pub fn eigen_spectrum(op: &HermitianOperator, how_many: HowMany) -> Result<SpectralReport> {
    let n = op.dim();
    let k = match how_many {
        HowMany::All => n,
        HowMany::Smallest(k) => {
            assert!(k >= 1 && k <= n, "how_many out of range");
            k
        }
    };
    if n <= DENSE_EIGEN_LIMIT || matches!(how_many, HowMany::All) {
        let mut vals = sorted_dense_eigenvalues(op);
        vals.truncate(k);
        let residual = f64::EPSILON * op.norm_scale() * (n as f64).sqrt() * 8.0;
        Ok(SpectralReport {
            eigenvalues: vals,
            eigenvectors: None,
            count_in_window: None,
            window: None,
            method: SolveMethod::Dense,
            residual_bound: residual,
        })
    } else {
        let (vals, vecs) = smallest_eigenpairs_shift_invert(op, k, 1e-11, 600)?;
        let residual = measured_residual(op, &vals, &vecs);
        Ok(SpectralReport {
            eigenvalues: vals,
            eigenvectors: Some(vecs),
            count_in_window: None,
            window: None,
            method: SolveMethod::Iterative,
            residual_bound: residual,
        })
    }
}

/// Like [`eigen_spectrum`] but always forms eigenvectors and measures the
/// actual residual `max_k |H ψ_k - μ_k ψ_k|`.
pub fn eigen_spectrum_with_vectors(
    op: &HermitianOperator,
    how_many: HowMany,
) -> Result<SpectralReport> {
    let n = op.dim();
    let k = match how_many {
        HowMany::All => n,
        HowMany::Smallest(k) => {
            assert!(k >= 1 && k <= n, "how_many out of range");
            k
        }
    };
    if n <= DENSE_EIGEN_LIMIT || matches!(how_many, HowMany::All) {
        let (mut vals, mut vecs) = dense_eigenpairs(op);
        vals.truncate(k);
        vecs.truncate(k);
        let residual = measured_residual(op, &vals, &vecs);
        Ok(SpectralReport {
            eigenvalues: vals,
            eigenvectors: Some(vecs),
            count_in_window: None,
            window: None,
            method: SolveMethod::Dense,
            residual_bound: residual,
        })
    } else {
        let (vals, vecs) = smallest_eigenpairs_shift_invert(op, k, 1e-11, 600)?;
        let residual = measured_residual(op, &vals, &vecs);
        Ok(SpectralReport {
            eigenvalues: vals,
            eigenvectors: Some(vecs),
            count_in_window: None,
            window: None,
            method: SolveMethod::Iterative,
            residual_bound: residual,
        })
    }
}

/// Number of eigenvalues strictly below `sigma`, by inertia of `H - sigma I`.
pub fn count_below(op: &HermitianOperator, sigma: f64) -> Result<usize> {
    BandedHermitian::from_operator(op, sigma)
        .ldl(op.norm_scale())
        .map(|f| f.negative_count())
        .map_err(|b| Error::FactorizationBreakdown { index: b.0 })
}

/// `Tr χ_[a,b](H)` via two inertia counts.
///
/// Endpoints are dilated outward by `1e-8 (1 + |e|)` so the closed interval
/// convention holds; a factorization breakdown doubles the dilation, up to
/// three retries.
pub fn count_in_interval(op: &HermitianOperator, window: SpectralWindow) -> Result<usize> {
    let mut factor = 1.0f64;
    let mut retries = 0usize;
    loop {
        let eps_a = 1e-8 * (1.0 + window.lower.abs()) * factor;
        let eps_b = 1e-8 * (1.0 + window.upper.abs()) * factor;
        let below_a = count_below(op, window.lower - eps_a);
        let above = below_a.and_then(|na| count_below(op, window.upper + eps_b).map(|nb| (na, nb)));
        match above {
            Ok((na, nb)) => return Ok(nb.saturating_sub(na)),
            Err(_) if retries < 3 => {
                retries += 1;
                factor *= 2.0;
            }
            Err(Error::FactorizationBreakdown { .. }) => {
                return Err(Error::EndpointCollision { retries })
            }
            Err(e) => return Err(e),
        }
    }
}

/// Smallest eigenvalue of the operator.
pub fn ground_energy(op: &HermitianOperator) -> Result<f64> {
    if op.dim() <= DENSE_EIGEN_LIMIT {
        Ok(sorted_dense_eigenvalues(op)[0])
    } else {
        let (vals, _) = smallest_eigenpairs_shift_invert(op, 1, 1e-11, 600)?;
        Ok(vals[0])
    }
}

/// Fraction of the squared mass of `psi` carried by a region,
/// `Σ w |ψ|² / Σ |ψ|²` (the grid measure h^d cancels).
pub fn eigenfunction_mass(psi: &[Complex64], region_indicator: &[f64]) -> Result<f64> {
    assert_eq!(psi.len(), region_indicator.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, w) in psi.iter().zip(region_indicator) {
        let m = p.norm_sqr();
        num += w * m;
        den += m;
    }
    if den == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(num / den)
}

/// Smallest eigenvalue of the multiplication operator compressed to the
/// span of an orthonormal basis: the bottom of `P U P` restricted to Ran P.
pub fn compressed_operator_bottom(
    projector_basis: &[DVector<Complex64>],
    multiplier_values: &[f64],
) -> Result<f64> {
    let k = projector_basis.len();
    if k == 0 {
        return Err(Error::EmptyWindow("projector has empty range".into()));
    }
    // Gram identity check
    let mut deviation = 0.0f64;
    for a in 0..k {
        for b in a..k {
            let g = projector_basis[a].dotc(&projector_basis[b]);
            let target = if a == b { 1.0 } else { 0.0 };
            deviation = deviation.max((g - Complex64::new(target, 0.0)).norm());
        }
    }
    if deviation > 1e-8 {
        return Err(Error::NonOrthonormalBasis { deviation });
    }

    let n = multiplier_values.len();
    let mut gram = nalgebra::DMatrix::<Complex64>::zeros(k, k);
    for a in 0..k {
        assert_eq!(projector_basis[a].len(), n);
        for b in a..k {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                s += projector_basis[a][i].conj()
                    * Complex64::new(multiplier_values[i], 0.0)
                    * projector_basis[b][i];
            }
            gram[(a, b)] = s;
            gram[(b, a)] = s.conj();
        }
    }
    let vals = gram.symmetric_eigenvalues();
    Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_background, FieldDescription};
    use crate::grid::GridSpec;
    use crate::operator::assemble_hamiltonian;

    fn free_1d(n: usize, h: f64) -> HermitianOperator {
        let grid = GridSpec::new(1, h * (n as f64 + 1.0), n).unwrap();
        let bg = sample_background(&FieldDescription::zero(), &grid).unwrap();
        assemble_hamiltonian(&grid, &bg, None, None).unwrap()
    }

    fn toeplitz_eigenvalue(n: usize, h: f64, k: usize) -> f64 {
        2.0 / (h * h) * (1.0 - (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
    }

    #[test]
    fn diagonal_spectrum_sorts() {
        let op = HermitianOperator::from_diagonal(&[3.0, 1.0, 2.0]);
        let rep = eigen_spectrum(&op, HowMany::All).unwrap();
        assert_eq!(rep.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(rep.method, SolveMethod::Dense);
    }

    #[test]
    fn free_1d_closed_form() {
        let op = free_1d(3, 1.0);
        let rep = eigen_spectrum(&op, HowMany::All).unwrap();
        let sqrt2 = 2.0f64.sqrt();
        let want = [2.0 - sqrt2, 2.0, 2.0 + sqrt2];
        for (got, want) in rep.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn shift_covariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut entries = Vec::new();
        let dim = 24;
        for i in 0..dim {
            entries.push((i as u32, i as u32, Complex64::new(rng.gen_range(-1.0..1.0), 0.0)));
            if i + 1 < dim {
                entries.push((
                    i as u32,
                    (i + 1) as u32,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                ));
            }
        }
        let op = HermitianOperator::from_triplets(dim, entries);
        let c = 0.731;
        let base = eigen_spectrum(&op, HowMany::All).unwrap().eigenvalues;
        let shifted = eigen_spectrum(&op.plus_identity(c), HowMany::All).unwrap().eigenvalues;
        for (a, b) in base.iter().zip(shifted) {
            assert!((a + c - b).abs() < 1e-10);
        }
    }

    #[test]
    fn count_in_interval_examples() {
        let op = HermitianOperator::from_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(count_in_interval(&op, SpectralWindow::new(1.5, 2.5).unwrap()).unwrap(), 1);
        assert_eq!(count_in_interval(&op, SpectralWindow::new(4.0, 5.0).unwrap()).unwrap(), 0);
        let free = free_1d(3, 1.0);
        assert_eq!(count_in_interval(&free, SpectralWindow::new(0.0, 2.1).unwrap()).unwrap(), 2);
    }

    #[test]
    fn closed_interval_includes_endpoint_eigenvalues() {
        let op = HermitianOperator::from_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(count_in_interval(&op, SpectralWindow::new(1.0, 3.0).unwrap()).unwrap(), 3);
        assert_eq!(count_in_interval(&op, SpectralWindow::new(2.0, 2.0).unwrap()).unwrap(), 1);
    }

    #[test]
    fn ground_energy_examples() {
        let op = HermitianOperator::from_diagonal(&[5.0, 7.0]);
        assert_eq!(ground_energy(&op).unwrap(), 5.0);
        let free = free_1d(3, 1.0);
        let g = ground_energy(&free).unwrap();
        assert!((g - (2.0 - 2.0f64.sqrt())).abs() < 1e-10);
        let bumped = free.plus_identity(0.3);
        assert!(ground_energy(&bumped).unwrap() >= g);
    }

    #[test]
    fn mass_trivial_regions() {
        let psi = vec![Complex64::new(0.5, 0.0); 4];
        assert_eq!(eigenfunction_mass(&psi, &[1.0; 4]).unwrap(), 1.0);
        assert_eq!(eigenfunction_mass(&psi, &[0.0; 4]).unwrap(), 0.0);
        let zero = vec![Complex64::new(0.0, 0.0); 4];
        assert!(matches!(eigenfunction_mass(&zero, &[1.0; 4]), Err(Error::ZeroVector)));
    }

    #[test]
    fn mass_of_free_ground_state_on_middle_third() {
        let n = 299;
        let op = free_1d(n, 1.0 / (n as f64 + 1.0)); // box (-1/2, 1/2)
        let rep = eigen_spectrum_with_vectors(&op, HowMany::Smallest(1)).unwrap();
        let psi = &rep.eigenvectors.as_ref().unwrap()[0];
        let grid = GridSpec::new(1, 1.0, n).unwrap();
        let region: Vec<f64> = (0..n)
            .map(|i| {
                let x = grid.point_coordinate(i)[0];
                if x.abs() < 1.0 / 6.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let mass = eigenfunction_mass(psi.as_slice(), &region).unwrap();
        let exact = 1.0 / 3.0 + 3.0f64.sqrt() / (2.0 * std::f64::consts::PI);
        assert!((mass - exact).abs() < 2e-3, "mass {mass} vs {exact}");
    }

    #[test]
    fn compressed_bottom_constant_multiplier() {
        let v = DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
        ]);
        let got = compressed_operator_bottom(&[v.clone()], &[0.7; 4]).unwrap();
        assert!((got - 0.7).abs() < 1e-14);
        let zero = compressed_operator_bottom(&[v], &[0.0; 4]).unwrap();
        assert!(zero.abs() < 1e-14);
    }

    #[test]
    fn compressed_bottom_two_by_two_oracle() {
        let h = 0.5;
        let psi1 = DVector::from_vec(vec![Complex64::new(h, 0.0); 4]);
        let psi2 = DVector::from_vec(vec![
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(-h, 0.0),
        ]);
        let u = [1.0, 0.5, 0.0, 0.0];
        // explicit 2x2 Gram and its closed-form smallest eigenvalue
        let g11: f64 = u.iter().zip(psi1.iter()).map(|(w, p)| w * p.norm_sqr()).sum();
        let g22: f64 = u.iter().zip(psi2.iter()).map(|(w, p)| w * p.norm_sqr()).sum();
        let g12: f64 = (0..4).map(|i| u[i] * (psi1[i].conj() * psi2[i]).re).sum();
        let mean = 0.5 * (g11 + g22);
        let want = mean - ((0.5 * (g11 - g22)).powi(2) + g12 * g12).sqrt();
        let got = compressed_operator_bottom(&[psi1, psi2], &u).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn compressed_bottom_rejects_skewed_basis() {
        let v1 = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let v2 = DVector::from_vec(vec![Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)]);
        assert!(matches!(
            compressed_operator_bottom(&[v1, v2], &[1.0, 1.0]),
            Err(Error::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn compressed_bottom_basis_rotation_invariance() {
        let op = free_1d(12, 1.0);
        let rep = eigen_spectrum_with_vectors(&op, HowMany::Smallest(2)).unwrap();
        let vecs = rep.eigenvectors.unwrap();
        let u: Vec<f64> = (0..12).map(|i| if i < 6 { 1.0 } else { 0.0 }).collect();
        let base = compressed_operator_bottom(&vecs, &u).unwrap();
        let (c, s) = (0.6f64, 0.8f64);
        let r1 = vecs[0].scale(c) + vecs[1].scale(s);
        let r2 = vecs[0].scale(-s) + vecs[1].scale(c);
        let rotated = compressed_operator_bottom(&[r1, r2], &u).unwrap();
        assert!((base - rotated).abs() < 1e-9);
    }
}
