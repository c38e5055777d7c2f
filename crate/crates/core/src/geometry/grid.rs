//! Periodic N x N sample grids over the parameter square [0, 2pi)^2 and
//! the 4th-order central-difference stencil that drives every grid
//! derivative in the library.
//!
//! Cells hold Option values; a stencil only fires when its whole window is
//! defined, so undefined cells (degenerate metric, missing frames,
//! non-periodic borders) propagate as undefined rather than poisoning
//! neighbours with garbage.

use std::f64::consts::TAU;

use crate::ambient::AmbientVector;

/// Offsets and weights of the 5-point 4th-order first-derivative stencil;
/// divide by 12 h.
pub(crate) const STENCIL: [(isize, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];

pub fn wrap_index(i: isize, n: usize, periodic: bool) -> Option<usize> {
    if periodic {
        Some(i.rem_euclid(n as isize) as usize)
    } else if (0..n as isize).contains(&i) {
        Some(i as usize)
    } else {
        None
    }
}

/// Periodic N x N grid of scalar samples (undefined cells allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    resolution: usize,
    periodic: bool,
    values: Vec<Option<f64>>,
}

impl ScalarGrid {
    pub fn new_undefined(resolution: usize, periodic: bool) -> Self {
        Self { resolution, periodic, values: vec![None; resolution * resolution] }
    }

    pub fn from_fn(
        resolution: usize,
        periodic: bool,
        mut f: impl FnMut(f64, f64) -> Option<f64>,
    ) -> Self {
        let h = TAU / resolution as f64;
        let mut values = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            for j in 0..resolution {
                values.push(f(i as f64 * h, j as f64 * h));
            }
        }
        Self { resolution, periodic, values }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    /// Grid spacing 2pi/N (both axes).
    pub fn spacing(&self) -> f64 {
        TAU / self.resolution as f64
    }

    pub fn u(&self, index: usize) -> f64 {
        self.spacing() * index as f64
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.resolution + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Option<f64>) {
        self.values[i * self.resolution + j] = value;
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn iter_defined(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.resolution;
        self.values
            .iter()
            .enumerate()
            .filter_map(move |(k, v)| v.map(|v| (k / n, k % n, v)))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            resolution: self.resolution,
            periodic: self.periodic,
            values: self.values.iter().map(|v| v.map(&f)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.resolution, other.resolution);
        Self {
            resolution: self.resolution,
            periodic: self.periodic && other.periodic,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => Some(f(*a, *b)),
                    _ => None,
                })
                .collect(),
        }
    }

    /// 4th-order central difference along the given axis (0: u1, 1: u2).
    pub fn derivative(&self, axis: usize) -> ScalarGrid {
        assert!(self.resolution >= 5, "stencil needs at least 5 cells per axis");
        let n = self.resolution;
        let h = self.spacing();
        let mut out = ScalarGrid::new_undefined(n, self.periodic);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                let mut ok = true;
                for (off, w) in STENCIL {
                    let (io, jo) = if axis == 0 { (i as isize + off, j as isize) } else { (i as isize, j as isize + off) };
                    let sample = wrap_index(io, n, self.periodic)
                        .zip(wrap_index(jo, n, self.periodic))
                        .and_then(|(a, b)| self.get(a, b));
                    match sample {
                        Some(v) => acc += w * v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && self.get(i, j).is_some() {
                    out.set(i, j, Some(acc / (12.0 * h)));
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> Option<f64> {
        self.values
            .iter()
            .flatten()
            .map(|v| v.abs())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// Values of a 1-form on the orthonormal frame (e1, e2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneFormSample {
    pub on_e1: f64,
    pub on_e2: f64,
}

impl OneFormSample {
    /// omega ∘ J with J e1 = e2, J e2 = -e1: (a1, a2) -> (a2, -a1).
    pub fn compose_j(self) -> Self {
        Self { on_e1: self.on_e2, on_e2: -self.on_e1 }
    }

    pub fn norm_sq(self) -> f64 {
        self.on_e1 * self.on_e1 + self.on_e2 * self.on_e2
    }
}

#[derive(Debug, Clone)]
pub struct OneFormGrid {
    resolution: usize,
    values: Vec<Option<OneFormSample>>,
}

impl OneFormGrid {
    pub fn new_undefined(resolution: usize) -> Self {
        Self { resolution, values: vec![None; resolution * resolution] }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, i: usize, j: usize) -> Option<OneFormSample> {
        self.values[i * self.resolution + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Option<OneFormSample>) {
        self.values[i * self.resolution + j] = value;
    }

    pub fn component(&self, which: FrameDirection) -> ScalarGrid {
        let mut out = ScalarGrid::new_undefined(self.resolution, true);
        for i in 0..self.resolution {
            for j in 0..self.resolution {
                out.set(
                    i,
                    j,
                    self.get(i, j).map(|s| match which {
                        FrameDirection::E1 => s.on_e1,
                        FrameDirection::E2 => s.on_e2,
                    }),
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    E1,
    E2,
}

/// Grid of ambient-vector samples.
#[derive(Debug, Clone)]
pub struct VectorGrid {
    resolution: usize,
    periodic: bool,
    values: Vec<Option<AmbientVector>>,
}

impl VectorGrid {
    pub fn new_undefined(resolution: usize, periodic: bool) -> Self {
        Self { resolution, periodic, values: vec![None; resolution * resolution] }
    }

    pub fn from_fn(
        resolution: usize,
        periodic: bool,
        mut f: impl FnMut(f64, f64) -> Option<AmbientVector>,
    ) -> Self {
        let h = TAU / resolution as f64;
        let mut values = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            for j in 0..resolution {
                values.push(f(i as f64 * h, j as f64 * h));
            }
        }
        Self { resolution, periodic, values }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&AmbientVector> {
        self.values[i * self.resolution + j].as_ref()
    }

    pub fn set(&mut self, i: usize, j: usize, value: Option<AmbientVector>) {
        self.values[i * self.resolution + j] = value;
    }

    /// 4th-order stencil derivative along an axis; undefined when any
    /// window sample is missing.
    pub fn derivative_at(&self, i: usize, j: usize, axis: usize) -> Option<AmbientVector> {
        let n = self.resolution;
        let h = TAU / n as f64;
        let center = self.get(i, j)?;
        let mut acc = AmbientVector::zeros(center.len());
        for (off, w) in STENCIL {
            let (io, jo) = if axis == 0 { (i as isize + off, j as isize) } else { (i as isize, j as isize + off) };
            let (a, b) = wrap_index(io, n, self.periodic).zip(wrap_index(jo, n, self.periodic))?;
            acc = acc.axpy(w, self.get(a, b)?);
        }
        Some(acc.scaled(1.0 / (12.0 * h)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_fourth_order_on_sine() {
        let mut prev: Option<f64> = None;
        for n in [32usize, 64] {
            let grid = ScalarGrid::from_fn(n, true, |u1, _| Some(u1.sin()));
            let d = grid.derivative(0);
            let mut err: f64 = 0.0;
            for (i, _, v) in d.iter_defined() {
                err = err.max((v - d.u(i).cos()).abs());
            }
            if let Some(p) = prev {
                assert!(p / err > 8.0, "ratio {}", p / err);
            }
            prev = Some(err);
        }
    }

    #[test]
    fn constant_grid_has_exactly_zero_derivative() {
        let grid = ScalarGrid::from_fn(16, true, |_, _| Some(0.7321));
        let d = grid.derivative(0);
        for (_, _, v) in d.iter_defined() {
            assert_eq!(v, 0.0);
        }
        assert_eq!(d.defined_count(), 16 * 16);
    }

    #[test]
    fn non_periodic_borders_are_undefined() {
        let grid = ScalarGrid::from_fn(16, false, |u1, _| Some(u1));
        let d = grid.derivative(0);
        assert_eq!(d.defined_count(), 16 * 12);
        assert!(d.get(0, 3).is_none());
        assert!(d.get(1, 3).is_none());
        assert!((d.get(5, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_cells_propagate_through_windows() {
        let mut grid = ScalarGrid::from_fn(16, true, |u1, _| Some(u1.sin()));
        grid.set(4, 4, None);
        let d = grid.derivative(0);
        for i in [2usize, 3, 4, 5, 6] {
            assert!(d.get(i, 4).is_none());
        }
        assert!(d.get(7, 4).is_some());
        assert!(d.get(4, 5).is_some());
    }

    #[test]
    fn compose_j_swaps_components() {
        let w = OneFormSample { on_e1: 2.0, on_e2: 3.0 };
        let wj = w.compose_j();
        // (dβ∘J)(e1) = dβ(e2)
        assert_eq!(wj.on_e1, 3.0);
        assert_eq!(wj.on_e2, -2.0);
    }
}
