//! Sparse complex Hermitian operators and the Peierls-phase discretization
//! of `H0 = (-i∇ + A0)^2 + V0` with Dirichlet boundary conditions.
//!
//! Only the upper triangle (row <= col) is stored, so conjugate symmetry is
//! exact by construction. Hoppings between nearest neighbors carry the phase
//! `exp(-i h A_k)` of the link midpoint, which keeps the assembly Hermitian
//! and gauge-covariant for any bounded vector potential.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::BackgroundField;
use crate::grid::{GridSpec, MAX_DIM};

#[derive(Debug, Clone)]
pub struct HermitianOperator {
    dim: usize,
    /// (row, col, value) with row <= col; diagonal values are real.
    entries: Vec<(u32, u32, Complex64)>,
    /// Operator index -> original grid flat index (identity when unmasked).
    site_map: Vec<u32>,
    bandwidth: usize,
}

impl HermitianOperator {
    /// Build from raw triplets. Triplets must satisfy row <= col and real
    /// diagonal; used mostly by tests and synthetic operators.
    pub fn from_triplets(dim: usize, entries: Vec<(u32, u32, Complex64)>) -> Self {
        let mut bandwidth = 0usize;
        for &(i, j, v) in &entries {
            assert!(i <= j, "upper-triangle convention violated");
            assert!((j as usize) < dim);
            if i == j {
                assert!(v.im == 0.0, "diagonal entries must be real");
            }
            bandwidth = bandwidth.max((j - i) as usize);
        }
        Self { dim, entries, site_map: (0..dim as u32).collect(), bandwidth }
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u32, i as u32, Complex64::new(v, 0.0)))
            .collect();
        Self::from_triplets(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn entries(&self) -> &[(u32, u32, Complex64)] {
        &self.entries
    }

    /// Original grid index behind each operator row (Dirichlet restriction
    /// to a sub-domain keeps grid order).
    pub fn site_map(&self) -> &[u32] {
        &self.site_map
    }

    /// True if every stored entry is real (no magnetic phases).
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|&(_, _, v)| v.im == 0.0)
    }

    /// Add a real constant to the whole diagonal, returning a new operator.
    pub fn plus_identity(&self, c: f64) -> Self {
        let mut out = self.clone();
        let mut seen = vec![false; self.dim];
        for e in &mut out.entries {
            if e.0 == e.1 {
                e.2 += Complex64::new(c, 0.0);
                seen[e.0 as usize] = true;
            }
        }
        for (i, done) in seen.iter().enumerate() {
            if !done {
                out.entries.push((i as u32, i as u32, Complex64::new(c, 0.0)));
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        y.fill(Complex64::new(0.0, 0.0));
        for &(i, j, v) in &self.entries {
            let (i, j) = (i as usize, j as usize);
            y[i] += v * x[j];
            if i != j {
                y[j] += v.conj() * x[i];
            }
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i as usize, j as usize)] = v;
            if i != j {
                m[(j as usize, i as usize)] = v.conj();
            }
        }
        m
    }

    /// Dense real-symmetric copy; only valid when `is_real()`.
    pub fn to_dense_real(&self) -> nalgebra::DMatrix<f64> {
        debug_assert!(self.is_real());
        let mut m = nalgebra::DMatrix::<f64>::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i as usize, j as usize)] = v.re;
            if i != j {
                m[(j as usize, i as usize)] = v.re;
            }
        }
        m
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut diag = vec![0.0f64; self.dim];
        let mut radius = vec![0.0f64; self.dim];
        for &(i, j, v) in &self.entries {
            if i == j {
                diag[i as usize] += v.re;
            } else {
                radius[i as usize] += v.norm();
                radius[j as usize] += v.norm();
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim {
            lo = lo.min(diag[i] - radius[i]);
            hi = hi.max(diag[i] + radius[i]);
        }
        (lo, hi)
    }

    /// A magnitude scale for breakdown and residual thresholds.
    pub fn norm_scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin_bounds();
        lo.abs().max(hi.abs()).max(1.0)
    }
}

/// Assemble the Dirichlet restriction of `H0 + extra_potential` on a grid.
///
/// Diagonal: `2d/h^2 + V0 + energy_shift + extra`. Hopping from x to
/// x + h e_k: `-(1/h^2) exp(-i h A_k(link midpoint))`. Masked grid points
/// (`mask[flat] = true`) are removed, which realizes the Dirichlet operator
/// on the complement sub-domain.
pub fn assemble_hamiltonian(
    grid: &GridSpec,
    background: &BackgroundField,
    extra_potential: Option<&[f64]>,
    domain_mask: Option<&[bool]>,
) -> Result<HermitianOperator> {
    let d = grid.dim();
    let n = grid.points_per_side();
    let h = grid.spacing();
    let total = grid.total_points();
    let hop = 1.0 / (h * h);
    let diag_base = 2.0 * d as f64 / (h * h) + background.energy_shift();

    if let Some(extra) = extra_potential {
        assert_eq!(extra.len(), total, "extra potential must cover the grid");
    }
    if let Some(mask) = domain_mask {
        assert_eq!(mask.len(), total, "domain mask must cover the grid");
    }
    let removed = |flat: usize| domain_mask.map_or(false, |m| m[flat]);

    // Re-index kept points, preserving grid order.
    let mut new_index = vec![u32::MAX; total];
    let mut site_map = Vec::new();
    for flat in 0..total {
        if !removed(flat) {
            new_index[flat] = site_map.len() as u32;
            site_map.push(flat as u32);
        }
    }
    let kept = site_map.len();
    if kept == 0 {
        return Err(Error::MaskDisconnectsEverything);
    }

    let scalar = background.scalar_values();
    let mut entries = Vec::with_capacity(kept * (d + 1));
    let mut bandwidth = 0usize;
    for (flat, multi) in grid.iter_points() {
        if removed(flat) {
            continue;
        }
        let row = new_index[flat];
        let mut diag = diag_base + scalar[flat];
        if let Some(extra) = extra_potential {
            diag += extra[flat];
        }
        entries.push((row, row, Complex64::new(diag, 0.0)));
        for axis in 0..d {
            if multi[axis] + 1 >= n {
                continue;
            }
            let mut up = multi;
            up[axis] += 1;
            let nb = grid.flat_index(&up);
            if removed(nb) {
                continue;
            }
            let col = new_index[nb];
            let a = background.link_above(axis, &multi);
            let phase = Complex64::from_polar(1.0, -h * a);
            entries.push((row, col, -hop * phase));
            bandwidth = bandwidth.max((col - row) as usize);
        }
    }

    Ok(HermitianOperator { dim: kept, entries, site_map, bandwidth })
}
