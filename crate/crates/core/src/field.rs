//! Background fields: the scalar potential V0 at grid points and the
//! magnetic vector potential A0 sampled at nearest-neighbor link midpoints
//! (one staggered array per axis, including links to the Dirichlet boundary).

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::{GridSpec, MAX_DIM};

/// One scalar input field: a closed form or values tabulated at grid points.
#[derive(Debug, Clone)]
pub enum ScalarField {
    Zero,
    Constant(f64),
    Expr(Expr),
    /// One value per grid point, flat indexing. Link values are taken as the
    /// mean of the two endpoint values (single endpoint on boundary links).
    Table(Vec<f64>),
}

impl ScalarField {
    fn eval_point(&self, x: &[f64; MAX_DIM], flat: usize) -> f64 {
        match self {
            ScalarField::Zero => 0.0,
            ScalarField::Constant(c) => *c,
            ScalarField::Expr(e) => e.eval(x),
            ScalarField::Table(t) => t[flat],
        }
    }
}

/// Field description as accepted from configs: one component per axis for
/// A0 (missing components are zero) and one scalar for V0.
#[derive(Debug, Clone)]
pub struct FieldDescription {
    pub vector_potential: Vec<ScalarField>,
    pub scalar_potential: ScalarField,
}

impl FieldDescription {
    pub fn zero() -> Self {
        Self { vector_potential: Vec::new(), scalar_potential: ScalarField::Zero }
    }
}

#[derive(Debug, Clone)]
pub struct BackgroundField {
    dim: usize,
    n: usize,
    /// Per axis k: A_k at link midpoints; extent n+1 along axis k, n along
    /// the others, axis 0 fastest. Axes >= dim are empty.
    links: [Vec<f64>; MAX_DIM],
    /// V0 at grid points, flat indexing.
    scalar: Vec<f64>,
    /// Additive normalization constant folded into the diagonal.
    energy_shift: f64,
}

/// Sup-norms of the rewritten first-order form `-Δ + b0·∇ + c0` with
/// `b0 = -2iA0` and `c0 = V0 + |A0|^2 - i div A0`. All values are grid
/// maxima and therefore lower bounds of the continuum sup-norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldNorms {
    pub norm_b: f64,
    pub norm_c: f64,
    pub norm_v0: f64,
    pub norm_div_a: f64,
}

impl FieldNorms {
    pub fn zero() -> Self {
        Self { norm_b: 0.0, norm_c: 0.0, norm_v0: 0.0, norm_div_a: 0.0 }
    }
}

fn link_extents(dim: usize, n: usize, axis: usize) -> [usize; MAX_DIM] {
    let mut ext = [1usize; MAX_DIM];
    for (j, e) in ext.iter_mut().enumerate().take(dim) {
        *e = if j == axis { n + 1 } else { n };
    }
    ext
}

fn link_flat(ext: &[usize; MAX_DIM], lm: &[usize; MAX_DIM]) -> usize {
    let mut flat = 0;
    for k in (0..MAX_DIM).rev() {
        debug_assert!(lm[k] < ext[k]);
        flat = flat * ext[k] + lm[k];
    }
    flat
}

impl BackgroundField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn energy_shift(&self) -> f64 {
        self.energy_shift
    }

    pub fn set_energy_shift(&mut self, shift: f64) {
        self.energy_shift = shift;
    }

    pub fn scalar_values(&self) -> &[f64] {
        &self.scalar
    }

    /// A_k on the link between point `m` and `m + e_k` (`lm[k] = m[k] + 1`).
    pub fn link_above(&self, axis: usize, m: &[usize; MAX_DIM]) -> f64 {
        let mut lm = *m;
        lm[axis] += 1;
        self.link_value(axis, &lm)
    }

    /// A_k on the link between `m - e_k` and point `m` (`lm[k] = m[k]`).
    pub fn link_below(&self, axis: usize, m: &[usize; MAX_DIM]) -> f64 {
        self.link_value(axis, m)
    }

    fn link_value(&self, axis: usize, lm: &[usize; MAX_DIM]) -> f64 {
        let ext = link_extents(self.dim, self.n, axis);
        self.links[axis][link_flat(&ext, lm)]
    }

    /// Midpoint coordinate of link `lm` along `axis`.
    fn link_midpoint(&self, grid: &GridSpec, axis: usize, lm: &[usize; MAX_DIM]) -> [f64; MAX_DIM] {
        let h = grid.spacing();
        let half = grid.side_length() / 2.0;
        let mut x = [0.0; MAX_DIM];
        for j in 0..self.dim {
            x[j] = if j == axis {
                -half + (lm[j] as f64 + 0.5) * h
            } else {
                -half + (lm[j] as f64 + 1.0) * h
            };
        }
        x
    }

    fn for_each_link(dim: usize, n: usize, axis: usize, mut f: impl FnMut([usize; MAX_DIM], usize)) {
        let ext = link_extents(dim, n, axis);
        let total: usize = ext.iter().product();
        for flat in 0..total {
            let mut rem = flat;
            let mut lm = [0usize; MAX_DIM];
            for k in 0..MAX_DIM {
                lm[k] = rem % ext[k];
                rem /= ext[k];
            }
            f(lm, flat);
        }
    }
}

/// Sample a field description on a grid. A0 components are evaluated at link
/// midpoints (tabulated components by endpoint averaging), V0 at grid points.
pub fn sample_background(description: &FieldDescription, grid: &GridSpec) -> Result<BackgroundField> {
    let dim = grid.dim();
    let n = grid.points_per_side();
    let mut bg = BackgroundField {
        dim,
        n,
        links: Default::default(),
        scalar: vec![0.0; grid.total_points()],
        energy_shift: 0.0,
    };

    for (flat, multi) in grid.iter_points() {
        let x = grid.coordinate(&multi);
        let v = description.scalar_potential.eval_point(&x, flat);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { at: x[..dim].to_vec() });
        }
        bg.scalar[flat] = v;
    }

    for axis in 0..dim {
        let component = description.vector_potential.get(axis).unwrap_or(&ScalarField::Zero);
        let ext = link_extents(dim, n, axis);
        let mut values = vec![0.0; ext.iter().product()];
        let mut bad: Option<[f64; MAX_DIM]> = None;
        BackgroundField::for_each_link(dim, n, axis, |lm, flat| {
            let x = bg.link_midpoint(grid, axis, &lm);
            let v = match component {
                ScalarField::Table(t) => {
                    // Average the two endpoint grid points; boundary links
                    // only have one interior endpoint.
                    let mut sum = 0.0;
                    let mut cnt = 0.0;
                    if lm[axis] > 0 {
                        let mut pm = lm;
                        pm[axis] -= 1;
                        sum += t[grid.flat_index(&pm)];
                        cnt += 1.0;
                    }
                    if lm[axis] < n {
                        sum += t[grid.flat_index(&lm)];
                        cnt += 1.0;
                    }
                    sum / cnt
                }
                other => other.eval_point(&x, 0),
            };
            if !v.is_finite() && bad.is_none() {
                bad = Some(x);
            }
            values[flat] = v;
        });
        if let Some(x) = bad {
            return Err(Error::NonFiniteSample { at: x[..dim].to_vec() });
        }
        bg.links[axis] = values;
    }

    Ok(bg)
}

/// Shift every link value by the discrete gradient of a gauge function chi:
/// the link from x to x + h e_k gains (chi(x + h e_k) - chi(x))/h. The
/// assembled spectrum is invariant under this map.
pub fn gauge_transform(
    background: &BackgroundField,
    grid: &GridSpec,
    chi: impl Fn(&[f64; MAX_DIM]) -> f64,
) -> BackgroundField {
    let mut out = background.clone();
    let h = grid.spacing();
    let half = grid.side_length() / 2.0;
    for axis in 0..background.dim {
        BackgroundField::for_each_link(background.dim, background.n, axis, |lm, flat| {
            // Endpoint coordinates; lm[axis] = j joins point j-1 to point j,
            // where index -1 and n land on the box boundary.
            let mut lo = [0.0; MAX_DIM];
            let mut hi = [0.0; MAX_DIM];
            for j in 0..background.dim {
                let base = -half + (lm[j] as f64 + 1.0) * h;
                if j == axis {
                    lo[j] = base - h;
                    hi[j] = base;
                } else {
                    lo[j] = base;
                    hi[j] = base;
                }
            }
            out.links[axis][flat] += (chi(&hi) - chi(&lo)) / h;
        });
    }
    out
}

/// Grid sup-norms of b0 and c0 for the sampled background.
///
/// The per-point |A0| uses the mean of the two adjacent link values on each
/// axis, and norm_b additionally dominates every per-point Euclidean norm so
/// that `norm_c <= norm_v0 + (norm_b/2)^2 + norm_div_a` holds structurally.
pub fn field_norms(background: &BackgroundField, grid: &GridSpec) -> FieldNorms {
    let dim = background.dim;
    let h = grid.spacing();

    let mut max_link = 0.0f64;
    for axis in 0..dim {
        for &v in &background.links[axis] {
            max_link = max_link.max(v.abs());
        }
    }

    let mut max_point_euclid = 0.0f64;
    let mut norm_v0 = 0.0f64;
    let mut norm_div = 0.0f64;
    let mut norm_c = 0.0f64;
    for (flat, multi) in grid.iter_points() {
        let mut sq = 0.0;
        let mut div = 0.0;
        for axis in 0..dim {
            let below = background.link_below(axis, &multi);
            let above = background.link_above(axis, &multi);
            let avg = 0.5 * (below + above);
            sq += avg * avg;
            div += (above - below) / h;
        }
        let v_eff = background.scalar[flat] + background.energy_shift;
        norm_v0 = norm_v0.max(v_eff.abs());
        norm_div = norm_div.max(div.abs());
        max_point_euclid = max_point_euclid.max(sq.sqrt());
        norm_c = norm_c.max(((v_eff + sq).powi(2) + div * div).sqrt());
    }

    FieldNorms {
        norm_b: 2.0 * max_link.max(max_point_euclid),
        norm_c,
        norm_v0,
        norm_div_a: norm_div,
    }
}

/// Shift V0 so the assembled H0 on this grid has smallest eigenvalue zero.
/// Applying it twice changes the shift by no more than solver tolerance.
pub fn normalize_ground_energy(
    background: &BackgroundField,
    grid: &GridSpec,
) -> Result<BackgroundField> {
    let op = crate::operator::assemble_hamiltonian(grid, background, None, None)?;
    let e = crate::spectra::ground_energy(&op)?;
    let mut out = background.clone();
    out.energy_shift -= e;
    Ok(out)
}
