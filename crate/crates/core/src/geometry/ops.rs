//! Grid-based differential geometry over an immersed surface: intrinsic
//! Gaussian curvature, gradients and Laplace–Beltrami in the induced
//! metric, covariant differentiation of frame fields, connection forms and
//! second fundamental forms.
//!
//! Every second-order quantity is a finite difference of first-order grid
//! fields (5-point 4th-order stencils, periodic wrap); there is no
//! second-order automatic differentiation anywhere.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::ambient::{rinner, AmbientVector};
use crate::error::{Error, Result};
use crate::frames::{frame_at, FrameMode, FrameSample};
use crate::geometry::grid::{
    wrap_index, FrameDirection, OneFormGrid, OneFormSample, ScalarGrid, VectorGrid,
};
use crate::surface::{Immersion, MetricTensor};
use crate::tolerances;

/// Why a grid cell was not evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    Legendrian,
    AlphaUndefined,
    FrameDegenerate,
    MetricDegenerate,
    OutsideRegime,
    IncompleteWindow,
}

impl SkipReason {
    pub fn label(self) -> &'static str {
        match self {
            SkipReason::Legendrian => "legendrian",
            SkipReason::AlphaUndefined => "alpha-undefined",
            SkipReason::FrameDegenerate => "frame-degenerate",
            SkipReason::MetricDegenerate => "metric-degenerate",
            SkipReason::OutsideRegime => "outside-regime",
            SkipReason::IncompleteWindow => "incomplete-window",
        }
    }
}

/// Metric tensor samples over the parameter grid.
#[derive(Debug, Clone)]
pub struct MetricField {
    resolution: usize,
    periodic: bool,
    values: Vec<Option<MetricTensor>>,
}

impl MetricField {
    pub fn from_fn(
        resolution: usize,
        periodic: bool,
        mut f: impl FnMut(f64, f64) -> Option<MetricTensor>,
    ) -> Self {
        let h = TAU / resolution as f64;
        let mut values = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            for j in 0..resolution {
                let g = f(i as f64 * h, j as f64 * h)
                    .filter(|g| g.det().is_finite() && g.det() > tolerances::IMMERSION_FLOOR);
                values.push(g);
            }
        }
        Self { resolution, periodic, values }
    }

    pub fn from_immersion(imm: &Immersion, resolution: usize) -> Self {
        Self::from_fn(resolution, imm.periodic(), |u1, u2| {
            crate::surface::induced_metric(imm, u1, u2).ok()
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            resolution: self.resolution,
            periodic: self.periodic,
            values: self
                .values
                .iter()
                .map(|g| {
                    g.map(|g| MetricTensor { g11: c * g.g11, g12: c * g.g12, g22: c * g.g22 })
                })
                .collect(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, i: usize, j: usize) -> Option<MetricTensor> {
        self.values[i * self.resolution + j]
    }

    fn component(&self, pick: impl Fn(&MetricTensor) -> f64) -> ScalarGrid {
        let mut out = ScalarGrid::new_undefined(self.resolution, self.periodic);
        for i in 0..self.resolution {
            for j in 0..self.resolution {
                out.set(i, j, self.get(i, j).as_ref().map(&pick));
            }
        }
        out
    }
}

/// Coordinates of an orthonormal frame pair in the (df/du1, df/du2) basis;
/// rows are e1 and e2.
#[derive(Debug, Clone)]
pub struct CoordFrameField {
    resolution: usize,
    values: Vec<Option<[[f64; 2]; 2]>>,
}

impl CoordFrameField {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, i: usize, j: usize) -> Option<[[f64; 2]; 2]> {
        self.values[i * self.resolution + j]
    }

    /// Metric-orthonormalized coordinate frame: e1 along df/du1, e2 its
    /// Gram-Schmidt complement (used by metric-only callers; surface
    /// computations use the contact frame coordinates from `FrameGrid`).
    pub fn orthonormal_from_metric(metric: &MetricField) -> Self {
        let n = metric.resolution;
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(metric.get(i, j).map(|g| {
                    let det = g.det();
                    [
                        [1.0 / g.g11.sqrt(), 0.0],
                        [-g.g12 / (g.g11 * det).sqrt(), (g.g11 / det).sqrt()],
                    ]
                }));
            }
        }
        Self { resolution: n, values }
    }
}

/// Frames, metric and frame coordinates sampled over the grid, with the
/// per-cell reason when construction failed.
#[derive(Debug, Clone)]
pub struct FrameGrid {
    resolution: usize,
    n_dim: usize,
    frames: Vec<Option<FrameSample>>,
    reasons: Vec<Option<SkipReason>>,
    metric: MetricField,
    coords: CoordFrameField,
}

impl FrameGrid {
    pub fn build(imm: &Immersion, resolution: usize) -> Result<Self> {
        if !(8..=4096).contains(&resolution) {
            return Err(Error::GridResolution { n: resolution, min: 8, max: 4096 });
        }
        let h = TAU / resolution as f64;
        let mut frames = Vec::with_capacity(resolution * resolution);
        let mut reasons = vec![None; resolution * resolution];
        let mut coords = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            for j in 0..resolution {
                let (u1, u2) = (i as f64 * h, j as f64 * h);
                match frame_at(imm, u1, u2) {
                    Ok(sample) => {
                        let (t1, t2) = imm.derivatives(u1, u2);
                        let g = sample.metric;
                        let det = g.det();
                        let solve = |e: &AmbientVector| {
                            let b1 = rinner(e, &t1);
                            let b2 = rinner(e, &t2);
                            [(g.g22 * b1 - g.g12 * b2) / det, (g.g11 * b2 - g.g12 * b1) / det]
                        };
                        coords.push(Some([solve(&sample.e1), solve(&sample.e2)]));
                        frames.push(Some(sample));
                    }
                    Err(err) => {
                        reasons[i * resolution + j] = Some(match err {
                            Error::DegenerateMetric { .. } => SkipReason::MetricDegenerate,
                            _ => SkipReason::FrameDegenerate,
                        });
                        frames.push(None);
                        coords.push(None);
                    }
                }
            }
        }
        Ok(Self {
            resolution,
            n_dim: imm.n(),
            frames,
            reasons,
            metric: MetricField::from_immersion(imm, resolution),
            coords: CoordFrameField { resolution, values: coords },
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn frame(&self, i: usize, j: usize) -> Option<&FrameSample> {
        self.frames[i * self.resolution + j].as_ref()
    }

    pub fn skip_reason(&self, i: usize, j: usize) -> Option<SkipReason> {
        self.reasons[i * self.resolution + j]
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn coords(&self) -> &CoordFrameField {
        &self.coords
    }

    pub fn beta_grid(&self) -> ScalarGrid {
        let mut out = ScalarGrid::new_undefined(self.resolution, true);
        for i in 0..self.resolution {
            for j in 0..self.resolution {
                out.set(i, j, self.frame(i, j).map(|s| s.beta));
            }
        }
        out
    }

    pub fn alpha_grid(&self) -> ScalarGrid {
        let mut out = ScalarGrid::new_undefined(self.resolution, true);
        for i in 0..self.resolution {
            for j in 0..self.resolution {
                out.set(i, j, self.frame(i, j).and_then(|s| s.alpha));
            }
        }
        out
    }

    /// Window sample with e1/e2 signs aligned to the window's center.
    fn aligned_sample(&self, center: &FrameSample, i: isize, j: isize) -> Option<FrameSample> {
        let n = self.resolution;
        let (a, b) = wrap_index(i, n, true).zip(wrap_index(j, n, true))?;
        let s = self.frames[a * n + b].as_ref()?;
        let flip1 = rinner(&s.e1, &center.e1) < 0.0;
        let flip2 = rinner(&s.e2, &center.e2) < 0.0;
        Some(s.flipped(flip1, flip2))
    }

    /// Sphere-covariant directional derivatives (D_{e1} X, D_{e2} X) of a
    /// frame-derived vector field, differenced over a sign-aligned window.
    pub fn frame_directional_derivatives(
        &self,
        i: usize,
        j: usize,
        extract: &dyn Fn(&FrameSample) -> AmbientVector,
    ) -> Option<(AmbientVector, AmbientVector)> {
        let center = self.frame(i, j)?;
        let coords = self.coords.get(i, j)?;
        let h = TAU / self.resolution as f64;
        let dim = center.point.len();
        let mut along_axis = [AmbientVector::zeros(dim), AmbientVector::zeros(dim)];
        for (axis, slot) in along_axis.iter_mut().enumerate() {
            let mut acc = AmbientVector::zeros(dim);
            for (off, w) in crate::geometry::grid::STENCIL {
                let (io, jo) = if axis == 0 {
                    (i as isize + off, j as isize)
                } else {
                    (i as isize, j as isize + off)
                };
                let sample = self.aligned_sample(center, io, jo)?;
                acc = acc.axpy(w, &extract(&sample));
            }
            *slot = acc.scaled(1.0 / (12.0 * h));
        }
        let project = |d: AmbientVector| {
            let d = d;
            d.axpy(-rinner(&d, &center.point), &center.point)
        };
        let d1 = along_axis[0].scaled(coords[0][0]).axpy(coords[0][1], &along_axis[1]);
        let d2 = along_axis[0].scaled(coords[1][0]).axpy(coords[1][1], &along_axis[1]);
        Some((project(d1), project(d2)))
    }
}

/// One-form values of df on (e1, e2) plus |∇f|² = df(e1)² + df(e2)².
pub fn scalar_gradient(field: &ScalarGrid, coords: &CoordFrameField) -> (OneFormGrid, ScalarGrid) {
    let n = field.resolution();
    assert_eq!(n, coords.resolution());
    let d1 = field.derivative(0);
    let d2 = field.derivative(1);
    let mut forms = OneFormGrid::new_undefined(n);
    let mut normsq = ScalarGrid::new_undefined(n, field.periodic());
    for i in 0..n {
        for j in 0..n {
            if let (Some(a), Some(b), Some(c)) = (d1.get(i, j), d2.get(i, j), coords.get(i, j)) {
                let sample = OneFormSample {
                    on_e1: c[0][0] * a + c[0][1] * b,
                    on_e2: c[1][0] * a + c[1][1] * b,
                };
                forms.set(i, j, Some(sample));
                normsq.set(i, j, Some(sample.norm_sq()));
            }
        }
    }
    (forms, normsq)
}

/// df(e1) or df(e2) as a scalar grid.
pub fn directional_derivative(
    field: &ScalarGrid,
    coords: &CoordFrameField,
    which: FrameDirection,
) -> ScalarGrid {
    scalar_gradient(field, coords).0.component(which)
}

/// Divergence-form Laplace–Beltrami:
/// Δf = (1/√det g) ∂_i(√det g · g^{ij} ∂_j f), two stencil passes.
pub fn laplace_beltrami(field: &ScalarGrid, metric: &MetricField) -> ScalarGrid {
    let n = field.resolution();
    assert_eq!(n, metric.resolution());
    let d1 = field.derivative(0);
    let d2 = field.derivative(1);
    let mut flux1 = ScalarGrid::new_undefined(n, field.periodic());
    let mut flux2 = ScalarGrid::new_undefined(n, field.periodic());
    for i in 0..n {
        for j in 0..n {
            if let (Some(a), Some(b), Some(g)) = (d1.get(i, j), d2.get(i, j), metric.get(i, j)) {
                let (iu, ix, iv) = g.inverse();
                let sq = g.det().sqrt();
                flux1.set(i, j, Some(sq * (iu * a + ix * b)));
                flux2.set(i, j, Some(sq * (ix * a + iv * b)));
            }
        }
    }
    let f1 = flux1.derivative(0);
    let f2 = flux2.derivative(1);
    let mut out = ScalarGrid::new_undefined(n, field.periodic());
    for i in 0..n {
        for j in 0..n {
            if let (Some(a), Some(b), Some(g)) = (f1.get(i, j), f2.get(i, j), metric.get(i, j)) {
                out.set(i, j, Some((a + b) / g.det().sqrt()));
            }
        }
    }
    out
}

/// Intrinsic Gaussian curvature by the Brioschi formula, with all metric
/// derivatives from grid stencils.
pub fn gaussian_curvature_intrinsic(metric: &MetricField) -> ScalarGrid {
    let n = metric.resolution();
    let e = metric.component(|g| g.g11);
    let f = metric.component(|g| g.g12);
    let g = metric.component(|g| g.g22);
    let eu = e.derivative(0);
    let ev = e.derivative(1);
    let fu = f.derivative(0);
    let fv = f.derivative(1);
    let gu = g.derivative(0);
    let gv = g.derivative(1);
    let evv = ev.derivative(1);
    let fuv = fv.derivative(0);
    let guu = gu.derivative(0);
    let mut out = ScalarGrid::new_undefined(n, metric.periodic);
    for i in 0..n {
        for j in 0..n {
            let cell = (|| {
                let m = metric.get(i, j)?;
                let (e, f, g) = (m.g11, m.g12, m.g22);
                let (eu, ev) = (eu.get(i, j)?, ev.get(i, j)?);
                let (fu, fv) = (fu.get(i, j)?, fv.get(i, j)?);
                let (gu, gv) = (gu.get(i, j)?, gv.get(i, j)?);
                let (evv, fuv, guu) = (evv.get(i, j)?, fuv.get(i, j)?, guu.get(i, j)?);
                let det = m.det();
                let m1 = (-0.5 * evv + fuv - 0.5 * guu) * det
                    - 0.5 * eu * ((fv - 0.5 * gu) * g - f * 0.5 * gv)
                    + (fu - 0.5 * ev) * ((fv - 0.5 * gu) * f - e * 0.5 * gv);
                let m2 = -0.5 * ev * (0.5 * ev * g - f * 0.5 * gu)
                    + 0.5 * gu * (0.5 * ev * f - e * 0.5 * gu);
                Some((m1 - m2) / (det * det))
            })();
            out.set(i, j, cell);
        }
    }
    out
}

/// Covariant derivative in the sphere of an ambient-valued field sampled on
/// the grid, along a tangent direction at cell (i, j): the stencil
/// derivative of the field projected tangent to the sphere.
pub fn sphere_covariant_derivative(
    imm: &Immersion,
    field: &VectorGrid,
    i: usize,
    j: usize,
    direction: &AmbientVector,
) -> Option<AmbientVector> {
    let h = TAU / field.resolution() as f64;
    let (u1, u2) = (i as f64 * h, j as f64 * h);
    let z = imm.point(u1, u2);
    let (t1, t2) = imm.derivatives(u1, u2);
    let g = crate::surface::induced_metric(imm, u1, u2).ok()?;
    let det = g.det();
    let b1 = rinner(direction, &t1);
    let b2 = rinner(direction, &t2);
    let a1 = (g.g22 * b1 - g.g12 * b2) / det;
    let a2 = (g.g11 * b2 - g.g12 * b1) / det;
    let d1 = field.derivative_at(i, j, 0)?;
    let d2 = field.derivative_at(i, j, 1)?;
    let d = d1.scaled(a1).axpy(a2, &d2);
    Some(d.axpy(-rinner(&d, &z), &z))
}

/// Which unitary frame the connection form is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum W12Frame {
    /// The adapted frame built from e1 and v (regular mode cells only).
    Adapted,
    /// The axis frame f1 = e1 with deterministic completion (fallback mode
    /// cells only); this is the frame used by the w12-vanishing check.
    Axis,
}

/// w₁²(e_a) = <D_{e_a} f1, f2> over the grid, restricted to cells whose
/// frame mode matches the requested frame.
pub fn connection_form_w12(fg: &FrameGrid, frame: W12Frame) -> OneFormGrid {
    let n = fg.resolution();
    let mut out = OneFormGrid::new_undefined(n);
    for i in 0..n {
        for j in 0..n {
            let value = (|| {
                let s = fg.frame(i, j)?;
                let matches = match frame {
                    W12Frame::Adapted => s.mode == FrameMode::Regular,
                    W12Frame::Axis => s.mode == FrameMode::Fallback,
                };
                if !matches {
                    return None;
                }
                let pair = match &s.f2 {
                    Some(f2) => f2.clone(),
                    None => s.f1.times_i(),
                };
                let (d1, d2) = fg.frame_directional_derivatives(i, j, &|s: &FrameSample| s.f1.clone())?;
                Some(OneFormSample { on_e1: rinner(&d1, &pair), on_e2: rinner(&d2, &pair) })
            })();
            out.set(i, j, value);
        }
    }
    out
}

/// h^λ_{ja} = <D_{e_a} e_j, e_λ> for the Darboux normal directions.
#[derive(Debug, Clone)]
pub struct SecondFundamentalForm {
    /// h[λ][j][a], λ over normals, j the differentiated tangent index,
    /// a the direction index.
    pub h: Vec<[[f64; 2]; 2]>,
}

impl SecondFundamentalForm {
    pub fn trace(&self, lam: usize) -> f64 {
        self.h[lam][0][0] + self.h[lam][1][1]
    }

    pub fn symmetry_defect(&self) -> f64 {
        self.h
            .iter()
            .map(|m| (m[0][1] - m[1][0]).abs())
            .fold(0.0, f64::max)
    }

    pub fn det(&self, lam: usize) -> f64 {
        self.h[lam][0][0] * self.h[lam][1][1] - self.h[lam][0][1] * self.h[lam][1][0]
    }

    pub fn mean_curvature_norm(&self) -> f64 {
        self.h
            .iter()
            .enumerate()
            .map(|(lam, _)| self.trace(lam).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct SffGrid {
    resolution: usize,
    values: Vec<Option<SecondFundamentalForm>>,
}

impl SffGrid {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&SecondFundamentalForm> {
        self.values[i * self.resolution + j].as_ref()
    }
}

pub fn second_fundamental_form(fg: &FrameGrid) -> SffGrid {
    let n = fg.resolution();
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let cell = (|| {
                let s = fg.frame(i, j)?;
                let de1 = fg.frame_directional_derivatives(i, j, &|s: &FrameSample| s.e1.clone())?;
                let de2 = fg.frame_directional_derivatives(i, j, &|s: &FrameSample| s.e2.clone())?;
                let normals = s.normals();
                let mut h = Vec::with_capacity(normals.len());
                for nu in normals {
                    h.push([
                        [rinner(&de1.0, nu), rinner(&de1.1, nu)],
                        [rinner(&de2.0, nu), rinner(&de2.1, nu)],
                    ]);
                }
                Some(SecondFundamentalForm { h })
            })();
            values.push(cell);
        }
    }
    SffGrid { resolution: n, values }
}

/// Euclidean norm over normal directions of the mean-curvature components.
pub fn mean_curvature_norm(fg: &FrameGrid) -> ScalarGrid {
    let sff = second_fundamental_form(fg);
    let n = fg.resolution();
    let mut out = ScalarGrid::new_undefined(n, true);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, sff.get(i, j).map(|h| h.mean_curvature_norm()));
        }
    }
    out
}

/// θ₂¹(e_a) = <D_{e_a} e2, e1>; undefined within the tan guard of the
/// legendrian locus.
pub fn darboux_connection_theta21(fg: &FrameGrid) -> OneFormGrid {
    let n = fg.resolution();
    let mut out = OneFormGrid::new_undefined(n);
    for i in 0..n {
        for j in 0..n {
            let value = (|| {
                let s = fg.frame(i, j)?;
                if s.beta > std::f64::consts::FRAC_PI_2 - tolerances::TAN_GUARD {
                    return None;
                }
                let (d1, d2) = fg.frame_directional_derivatives(i, j, &|s: &FrameSample| s.e2.clone())?;
                Some(OneFormSample { on_e1: rinner(&d1, &s.e1), on_e2: rinner(&d2, &s.e1) })
            })();
            out.set(i, j, value);
        }
    }
    out
}

#[cfg(test)]
mod tests;
