//! Finite Dirichlet grids over the open cube (-L/2, L/2)^d.
//!
//! A grid keeps `n` interior points per side with spacing `h = L/(n+1)`;
//! the cube boundary itself carries no unknowns (Dirichlet). Interior
//! points are addressed either by a multi-index `(i_0, .., i_{d-1})` with
//! `i_k` in `0..n`, or by a flat index with axis 0 fastest.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dim: usize,
    side_length: f64,
    points_per_side: usize,
}

impl GridSpec {
    pub fn new(dim: usize, side_length: f64, points_per_side: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDimension(dim));
        }
        if !(side_length > 0.0) || !side_length.is_finite() {
            return Err(Error::NonPositiveSize(format!("side_length = {side_length}")));
        }
        if points_per_side < 2 {
            return Err(Error::NonPositiveSize(format!(
                "points_per_side = {points_per_side} (need at least 2)"
            )));
        }
        Ok(Self { dim, side_length, points_per_side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn points_per_side(&self) -> usize {
        self.points_per_side
    }

    /// Grid spacing `h = L/(n+1)`.
    pub fn spacing(&self) -> f64 {
        self.side_length / (self.points_per_side as f64 + 1.0)
    }

    /// Total number of interior points, `n^d`.
    pub fn total_points(&self) -> usize {
        self.points_per_side.pow(self.dim as u32)
    }

    /// Volume |Λ_L| = L^d.
    pub fn volume(&self) -> f64 {
        self.side_length.powi(self.dim as i32)
    }

    /// Flat index of a multi-index, axis 0 fastest.
    pub fn flat_index(&self, multi: &[usize; MAX_DIM]) -> usize {
        let n = self.points_per_side;
        let mut flat = 0;
        for k in (0..self.dim).rev() {
            debug_assert!(multi[k] < n);
            flat = flat * n + multi[k];
        }
        flat
    }

    /// Multi-index of a flat index; unused axes are zero.
    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let n = self.points_per_side;
        let mut rem = flat;
        let mut multi = [0usize; MAX_DIM];
        for k in 0..self.dim {
            multi[k] = rem % n;
            rem /= n;
        }
        debug_assert_eq!(rem, 0);
        multi
    }

    /// Box coordinate of an interior point; component `k` is
    /// `-L/2 + (i_k + 1) h`. Unused axes are zero.
    pub fn coordinate(&self, multi: &[usize; MAX_DIM]) -> [f64; MAX_DIM] {
        let h = self.spacing();
        let half = self.side_length / 2.0;
        let mut x = [0.0; MAX_DIM];
        for k in 0..self.dim {
            x[k] = -half + (multi[k] as f64 + 1.0) * h;
        }
        x
    }

    pub fn point_coordinate(&self, flat: usize) -> [f64; MAX_DIM] {
        self.coordinate(&self.multi_index(flat))
    }

    /// Iterate all interior points as (flat, multi) pairs in flat order.
    pub fn iter_points(&self) -> impl Iterator<Item = (usize, [usize; MAX_DIM])> + '_ {
        (0..self.total_points()).map(move |flat| (flat, self.multi_index(flat)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_dimensional_spacing() {
        let g = GridSpec::new(1, 1.0, 3).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.total_points(), 3);
    }

    #[test]
    fn two_dimensional_point_count() {
        let g = GridSpec::new(2, 5.0, 4).unwrap();
        assert_eq!(g.total_points(), 16);
    }

    #[test]
    fn three_dimensional_grid() {
        let g = GridSpec::new(3, 3.0, 8).unwrap();
        assert_eq!(g.total_points(), 512);
        assert!((g.spacing() - 1.0 / 3.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn spacing_consistency() {
        let g = GridSpec::new(2, 7.0, 13).unwrap();
        let back = g.spacing() * (g.points_per_side() as f64 + 1.0);
        assert!((back - g.side_length()).abs() <= f64::EPSILON * g.side_length());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(GridSpec::new(0, 1.0, 3).is_err());
        assert!(GridSpec::new(4, 1.0, 3).is_err());
        assert!(GridSpec::new(2, 0.0, 3).is_err());
        assert!(GridSpec::new(2, -1.0, 3).is_err());
        assert!(GridSpec::new(2, 1.0, 1).is_err());
    }

    #[test]
    fn coordinates_fill_open_box() {
        let g = GridSpec::new(1, 1.0, 3).unwrap();
        let xs: Vec<f64> = (0..3).map(|i| g.point_coordinate(i)[0]).collect();
        assert!(xs.iter().zip([-0.25, 0.0, 0.25]).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    proptest! {
        #[test]
        fn index_map_is_a_bijection(dim in 1usize..=3, n in 2usize..=9, probe in 0usize..729) {
            let g = GridSpec::new(dim, 2.0, n).unwrap();
            let total = g.total_points();
            let flat = probe % total;
            let multi = g.multi_index(flat);
            prop_assert_eq!(g.flat_index(&multi), flat);
            for k in dim..MAX_DIM {
                prop_assert_eq!(multi[k], 0);
            }
        }
    }
}
