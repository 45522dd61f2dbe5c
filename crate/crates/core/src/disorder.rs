//! The crooked alloy-type random potential `V_ω = λ Σ_j ω_j u_j(· - z_j)`:
//! single-site profiles, center placement inside unit cells, coupling
//! distributions with closed-form concentration functions, and the envelope
//! fields `U_L = Σ u_j(· - z_j)` and `W_L = Σ χ_{B(δ₋, z_j)}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, MAX_DIM};
use crate::seeding;

/// Tolerance for the pointwise envelope validation during assembly.
const ENVELOPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileShape {
    IndicatorBall,
    IndicatorCube,
    Tent,
}

/// A single-site bump `u` with `u₋ χ_{B(δ₋)} ≤ u ≤ χ_{Λ_{δ₊}}`.
#[derive(Debug, Clone, Copy)]
pub struct SingleSiteProfile {
    pub shape: ProfileShape,
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub u_minus: f64,
}

impl SingleSiteProfile {
    pub fn new(shape: ProfileShape, delta_minus: f64, delta_plus: f64, u_minus: f64) -> Result<Self> {
        if !(delta_minus > 0.0 && delta_minus < 0.5) {
            return Err(Error::OutOfRangeDelta(delta_minus));
        }
        if !(delta_plus > 0.0) {
            return Err(Error::InvalidDelta(format!("delta_plus = {delta_plus}")));
        }
        if !(u_minus > 0.0 && u_minus <= 1.0) {
            return Err(Error::InvalidDelta(format!("u_minus = {u_minus} outside (0, 1]")));
        }
        let p = Self { shape, delta_minus, delta_plus, u_minus };
        // the lower envelope ball must fit where the profile is large enough
        let feasible = match shape {
            ProfileShape::IndicatorBall | ProfileShape::IndicatorCube => {
                2.0 * delta_minus <= delta_plus
            }
            // tent height at sup-norm radius delta_minus is 1 - 2δ₋/δ₊
            ProfileShape::Tent => 1.0 - 2.0 * delta_minus / delta_plus >= u_minus,
        };
        if !feasible {
            return Err(Error::ProfileEnvelope(format!(
                "{shape:?} with delta_minus {delta_minus}, delta_plus {delta_plus}, u_minus {u_minus} \
                 cannot dominate u_minus on the inner ball"
            )));
        }
        Ok(p)
    }

    /// Profile value at displacement `rel = x - z_j`.
    pub fn evaluate(&self, rel: &[f64; MAX_DIM], dim: usize) -> f64 {
        let mut sup = 0.0f64;
        let mut sq = 0.0f64;
        for r in rel.iter().take(dim) {
            sup = sup.max(r.abs());
            sq += r * r;
        }
        match self.shape {
            ProfileShape::IndicatorBall => {
                if sq < self.delta_minus * self.delta_minus {
                    self.u_minus
                } else {
                    0.0
                }
            }
            ProfileShape::IndicatorCube => {
                if sup < self.delta_plus / 2.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileShape::Tent => (1.0 - 2.0 * sup / self.delta_plus).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementMode {
    /// Offsets zero, `z_j = j` (the ergodic special case).
    Periodic,
    /// Offsets uniform in `Λ_{1-2δ₋}(0)`, so `B(δ₋, z_j) ⊂ Λ₁(j)`.
    Crooked,
}

/// One lattice site with its (possibly offset) single-site center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub lattice: [i64; MAX_DIM],
    pub center: [f64; MAX_DIM],
}

/// Deterministic placement of single-site centers. Offsets are a pure
/// function of `(structure_seed, j)`, so any enumeration of sites sees the
/// same centers.
#[derive(Debug, Clone)]
pub struct CenterPlacement {
    dim: usize,
    delta_minus: f64,
    mode: PlacementMode,
    structure_seed: u64,
}

pub fn place_centers(
    dim: usize,
    delta_minus: f64,
    structure_seed: u64,
    mode: PlacementMode,
) -> Result<CenterPlacement> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidDimension(dim));
    }
    if !(delta_minus > 0.0 && delta_minus < 0.5) {
        return Err(Error::InvalidDelta(format!("delta_minus = {delta_minus} outside (0, 1/2)")));
    }
    Ok(CenterPlacement { dim, delta_minus, mode, structure_seed })
}

impl CenterPlacement {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self, j: &[i64; MAX_DIM]) -> [f64; MAX_DIM] {
        let mut off = [0.0; MAX_DIM];
        if matches!(self.mode, PlacementMode::Crooked) {
            let mut rng = seeding::stream(&[
                0xc3_u64,
                self.structure_seed,
                seeding::encode_coord(j[0]),
                seeding::encode_coord(j[1]),
                seeding::encode_coord(j[2]),
            ]);
            let half = (1.0 - 2.0 * self.delta_minus) / 2.0;
            for o in off.iter_mut().take(self.dim) {
                *o = rng.gen_range(-half..half);
            }
        }
        off
    }

    pub fn center(&self, j: &[i64; MAX_DIM]) -> [f64; MAX_DIM] {
        let off = self.offset(j);
        let mut z = [0.0; MAX_DIM];
        for k in 0..self.dim {
            z[k] = j[k] as f64 + off[k];
        }
        z
    }

    /// All sites whose support cube `Λ_{δ₊}(z_j)` meets the box `Λ_L`
    /// (the Dirichlet restriction of the full-space potential).
    pub fn sites_reaching(&self, side_length: f64, delta_plus: f64) -> Vec<Site> {
        let reach = (side_length + delta_plus + 1.0) / 2.0;
        let jmax = reach.ceil() as i64;
        let cut = (side_length + delta_plus) / 2.0;
        let mut sites = Vec::new();
        let range = -jmax..=jmax;
        let mut j = [0i64; MAX_DIM];
        self.enumerate(range, 0, &mut j, &mut |j| {
            let z = self.center(j);
            if (0..self.dim).all(|k| z[k].abs() < cut) {
                sites.push(Site { lattice: *j, center: z });
            }
        });
        sites
    }

    /// Lattice sites inside the open box, `j ∈ ℤ^d ∩ Λ_L`.
    pub fn sites_in_box(&self, side_length: f64) -> Vec<Site> {
        let jmax = (side_length / 2.0).ceil() as i64;
        let mut sites = Vec::new();
        let mut j = [0i64; MAX_DIM];
        self.enumerate(-jmax..=jmax, 0, &mut j, &mut |j| {
            if (0..self.dim).all(|k| (j[k] as f64).abs() < side_length / 2.0) {
                sites.push(Site { lattice: *j, center: self.center(j) });
            }
        });
        sites
    }

    fn enumerate(
        &self,
        range: std::ops::RangeInclusive<i64>,
        axis: usize,
        j: &mut [i64; MAX_DIM],
        f: &mut impl FnMut(&[i64; MAX_DIM]),
    ) {
        if axis == self.dim {
            f(j);
            return;
        }
        for v in range.clone() {
            j[axis] = v;
            self.enumerate(range.clone(), axis + 1, j, f);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Uniform,
    Tent,
}

/// Compactly supported non-degenerate coupling distribution on `[0, M]`.
#[derive(Debug, Clone, Copy)]
pub struct CouplingDistribution {
    pub kind: DistributionKind,
    pub support_max: f64,
}

impl CouplingDistribution {
    pub fn new(kind: DistributionKind, support_max: f64) -> Result<Self> {
        if !(support_max > 0.0) {
            return Err(Error::NonPositiveSize(format!("support_max = {support_max}")));
        }
        Ok(Self { kind, support_max })
    }

    /// Concentration function `S(t) = sup_a μ([a, a+t])`, in closed form.
    ///
    /// Uniform on [0,M]: `min(t/M, 1)`. Tent on [0,M] (symmetric triangle
    /// density): the best window is centered at M/2, giving
    /// `1 - (1 - t/M)^2` for `t <= M`.
    pub fn concentration(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeT(t));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let m = self.support_max;
        Ok(match self.kind {
            DistributionKind::Uniform => (t / m).min(1.0),
            DistributionKind::Tent => {
                if t >= m {
                    1.0
                } else {
                    1.0 - (1.0 - t / m) * (1.0 - t / m)
                }
            }
        })
    }

    /// Inverse CDF.
    pub fn quantile(&self, p: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&p));
        let m = self.support_max;
        match self.kind {
            DistributionKind::Uniform => m * p,
            DistributionKind::Tent => {
                if p <= 0.5 {
                    m * (p / 2.0).sqrt()
                } else {
                    m * (1.0 - ((1.0 - p) / 2.0).sqrt())
                }
            }
        }
    }
}

/// Coupling law per site: one default distribution plus optional per-site
/// overrides (the paper only needs a common support bound M).
#[derive(Debug, Clone)]
pub struct CouplingModel {
    pub default: CouplingDistribution,
    pub overrides: Vec<([i64; MAX_DIM], CouplingDistribution)>,
}

impl CouplingModel {
    pub fn uniform_everywhere(dist: CouplingDistribution) -> Self {
        Self { default: dist, overrides: Vec::new() }
    }

    pub fn for_site(&self, j: &[i64; MAX_DIM]) -> &CouplingDistribution {
        self.overrides
            .iter()
            .find(|(site, _)| site == j)
            .map(|(_, d)| d)
            .unwrap_or(&self.default)
    }

    /// Largest support bound over sites.
    pub fn support_max(&self) -> f64 {
        self.overrides
            .iter()
            .map(|(_, d)| d.support_max)
            .fold(self.default.support_max, f64::max)
    }

    /// `S_L(t) = sup_j S_{μ_j}(t)` over the given sites.
    pub fn concentration_sup(&self, t: f64, sites: &[Site]) -> Result<f64> {
        let mut s = self.default.concentration(t)?;
        for (site, dist) in &self.overrides {
            if sites.iter().any(|x| &x.lattice == site) {
                s = s.max(dist.concentration(t)?);
            }
        }
        Ok(s)
    }
}

/// One i.i.d. coupling configuration, aligned with a site list.
#[derive(Debug, Clone)]
pub struct OmegaSample {
    pub values: Vec<f64>,
    pub master_seed: u64,
    pub sample_index: u64,
}

impl OmegaSample {
    /// The deterministic corner configuration `ω ≡ value` (e.g. the
    /// all-M configuration η used for lower bounds).
    pub fn constant(value: f64, n_sites: usize) -> Self {
        Self { values: vec![value; n_sites], master_seed: 0, sample_index: 0 }
    }
}

/// Draw `ω_j` for each site. Each value is a pure function of
/// `(master_seed, sample_index, j)`, independent of enumeration order.
pub fn sample_omega(
    coupling: &CouplingModel,
    sites: &[Site],
    master_seed: u64,
    sample_index: u64,
) -> OmegaSample {
    let values = sites
        .iter()
        .map(|site| {
            let mut rng = seeding::stream(&[
                0x0a_u64,
                master_seed,
                sample_index,
                seeding::encode_coord(site.lattice[0]),
                seeding::encode_coord(site.lattice[1]),
                seeding::encode_coord(site.lattice[2]),
            ]);
            let u: f64 = rng.gen();
            coupling.for_site(&site.lattice).quantile(u)
        })
        .collect();
    OmegaSample { values, master_seed, sample_index }
}

/// Grid samples of the random potential and its envelopes.
#[derive(Debug, Clone)]
pub struct PotentialField {
    /// `λ Σ_j ω_j u_j(x - z_j)`
    pub v_omega: Vec<f64>,
    /// `U_L(x) = Σ_j u_j(x - z_j)`
    pub u_envelope: Vec<f64>,
    /// `W_L(x) = Σ_j χ_{B(δ₋, z_j)}(x)`, 0/1 valued
    pub w_indicator: Vec<f64>,
}

/// Accumulate the potential and envelopes over all contributing sites.
/// Grid membership of the indicator supports is open-set membership.
pub fn assemble_random_potential(
    grid: &GridSpec,
    sites: &[Site],
    profile: &SingleSiteProfile,
    omega: &OmegaSample,
    lambda: f64,
) -> Result<PotentialField> {
    assert_eq!(sites.len(), omega.values.len(), "omega must align with sites");
    let dim = grid.dim();
    let n = grid.points_per_side();
    let h = grid.spacing();
    let half = grid.side_length() / 2.0;
    let total = grid.total_points();

    let mut v = vec![0.0; total];
    let mut u_env = vec![0.0; total];
    let mut w = vec![0.0; total];

    let half_support = profile.delta_plus / 2.0;
    for (site, &w_j) in sites.iter().zip(&omega.values) {
        // grid index ranges overlapping the support cube of this site
        let mut lo = [0usize; MAX_DIM];
        let mut hi = [0usize; MAX_DIM];
        let mut empty = false;
        for k in 0..dim {
            let a = (site.center[k] - half_support + half) / h - 1.0;
            let b = (site.center[k] + half_support + half) / h - 1.0;
            let lo_k = a.floor().max(0.0) as usize;
            let hi_k = b.ceil().min((n - 1) as f64) as usize;
            if b < 0.0 || a > (n - 1) as f64 || lo_k > hi_k {
                empty = true;
                break;
            }
            lo[k] = lo_k;
            hi[k] = hi_k;
        }
        if empty {
            continue;
        }

        let mut idx = lo;
        'site: loop {
            let mut rel = [0.0; MAX_DIM];
            let mut multi = [0usize; MAX_DIM];
            for k in 0..dim {
                multi[k] = idx[k];
                rel[k] = -half + (idx[k] as f64 + 1.0) * h - site.center[k];
            }
            let u = profile.evaluate(&rel, dim);
            let in_ball = {
                let sq: f64 = rel.iter().take(dim).map(|r| r * r).sum();
                sq < profile.delta_minus * profile.delta_minus
            };
            let in_cube = (0..dim).all(|k| rel[k].abs() < half_support);
            if in_ball && u < profile.u_minus - ENVELOPE_TOL {
                return Err(Error::ProfileEnvelope(format!(
                    "u = {u} below u_minus = {} inside B(delta_minus) at site {:?}",
                    profile.u_minus, site.lattice
                )));
            }
            if u > (if in_cube { 1.0 } else { 0.0 }) + ENVELOPE_TOL {
                return Err(Error::ProfileEnvelope(format!(
                    "u = {u} exceeds the cube indicator at site {:?}",
                    site.lattice
                )));
            }
            let flat = grid.flat_index(&multi);
            u_env[flat] += u;
            v[flat] += lambda * w_j * u;
            if in_ball {
                w[flat] += 1.0;
            }

            // advance the local multi-index
            let mut k = 0;
            loop {
                if k == dim {
                    break 'site;
                }
                if idx[k] < hi[k] {
                    idx[k] += 1;
                    break;
                }
                idx[k] = lo[k];
                k += 1;
            }
        }
    }

    Ok(PotentialField { v_omega: v, u_envelope: u_env, w_indicator: w })
}
