//! The immersion abstraction, the built-in tori with analytic derivatives,
//! induced metric computation and grid validation.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::ambient::{rinner, AmbientVector, Complex};
use crate::error::{Error, Result};
use crate::tolerances;

type EvalFn = dyn Fn(f64, f64) -> Vec<Complex64> + Send + Sync;
type DerivFn = dyn Fn(f64, f64) -> (Vec<Complex64>, Vec<Complex64>) + Send + Sync;

/// An evaluatable map (u1, u2) -> S^{2n+1} with first-derivative access.
///
/// Evaluation is re-entrant: the closures are shared immutably, so
/// concurrent evaluation at different parameters cannot interfere.
#[derive(Clone)]
pub struct Immersion {
    n: usize,
    label: String,
    periodic: bool,
    eval: Arc<EvalFn>,
    deriv: Arc<DerivFn>,
    warnings: Vec<String>,
}

impl std::fmt::Debug for Immersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Immersion")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("periodic", &self.periodic)
            .field("warnings", &self.warnings)
            .finish()
    }
}

impl Immersion {
    pub fn new(
        n: usize,
        label: impl Into<String>,
        periodic: bool,
        eval: impl Fn(f64, f64) -> Vec<Complex64> + Send + Sync + 'static,
        deriv: impl Fn(f64, f64) -> (Vec<Complex64>, Vec<Complex64>) + Send + Sync + 'static,
    ) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::WrongSessionDimension { expected: 2, got: n });
        }
        Ok(Self {
            n,
            label: label.into(),
            periodic,
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            warnings: Vec::new(),
        })
    }

    /// Sphere parameter n (the surface lives in S^{2n+1}).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient complex dimension n+1.
    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub(crate) fn push_warnings(&mut self, warnings: Vec<String>) {
        self.warnings.extend(warnings);
    }

    pub fn point(&self, u1: f64, u2: f64) -> AmbientVector {
        AmbientVector::new((self.eval)(u1, u2))
    }

    /// (df/du1, df/du2) at the given parameters.
    pub fn derivatives(&self, u1: f64, u2: f64) -> (AmbientVector, AmbientVector) {
        let (d1, d2) = (self.deriv)(u1, u2);
        (AmbientVector::new(d1), AmbientVector::new(d2))
    }
}

/// Induced first fundamental form at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl MetricTensor {
    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    /// Inverse metric components (g^11, g^12, g^22).
    pub fn inverse(&self) -> (f64, f64, f64) {
        let d = self.det();
        (self.g22 / d, -self.g12 / d, self.g11 / d)
    }

    pub fn is_positive(&self) -> bool {
        self.g11 > 0.0 && self.det() > tolerances::IMMERSION_FLOOR
    }
}

/// g_ij = <df/du_i, df/du_j> at u; errors when the point is degenerate.
pub fn induced_metric(imm: &Immersion, u1: f64, u2: f64) -> Result<MetricTensor> {
    let (t1, t2) = imm.derivatives(u1, u2);
    let g = MetricTensor {
        g11: rinner(&t1, &t1),
        g12: rinner(&t1, &t2),
        g22: rinner(&t2, &t2),
    };
    let det = g.det();
    if !(det > tolerances::IMMERSION_FLOOR) {
        return Err(Error::DegenerateMetric { u1, u2, det });
    }
    Ok(g)
}

fn exp_i(t: f64) -> Complex {
    Complex::new(t.cos(), t.sin())
}

/// Minimal legendrian torus in S^5:
/// f(u1,u2) = (sqrt(3)/3)(e^{i u1}, e^{i u2}, e^{-i(u1+u2)}).
pub fn builtin_legendrian_torus(n: usize) -> Result<Immersion> {
    if n != 2 {
        return Err(Error::WrongSessionDimension { expected: 2, got: n });
    }
    let c = 3.0f64.sqrt() / 3.0;
    let i = Complex::new(0.0, 1.0);
    Immersion::new(
        2,
        "legendrian-torus",
        true,
        move |u1, u2| vec![c * exp_i(u1), c * exp_i(u2), c * exp_i(-(u1 + u2))],
        move |u1, u2| {
            let third = c * exp_i(-(u1 + u2));
            (
                vec![i * c * exp_i(u1), Complex::new(0.0, 0.0), -i * third],
                vec![Complex::new(0.0, 0.0), i * c * exp_i(u2), -i * third],
            )
        },
    )
}

/// Generalized Clifford torus in S^5:
/// f(u1,u2) = (sqrt(3)/3)(e^{i u1}, e^{i u2}, e^{i(u2-u1)}).
pub fn builtin_generalized_clifford_torus(n: usize) -> Result<Immersion> {
    if n != 2 {
        return Err(Error::WrongSessionDimension { expected: 2, got: n });
    }
    let c = 3.0f64.sqrt() / 3.0;
    let i = Complex::new(0.0, 1.0);
    Immersion::new(
        2,
        "generalized-clifford",
        true,
        move |u1, u2| vec![c * exp_i(u1), c * exp_i(u2), c * exp_i(u2 - u1)],
        move |u1, u2| {
            let third = c * exp_i(u2 - u1);
            (
                vec![i * c * exp_i(u1), Complex::new(0.0, 0.0), -i * third],
                vec![Complex::new(0.0, 0.0), i * c * exp_i(u2), i * third],
            )
        },
    )
}

/// Clifford torus in S^5: f(u1,u2) = (sqrt(2)/2)(e^{i u1}, e^{i u2}, 0).
pub fn builtin_clifford_torus(n: usize) -> Result<Immersion> {
    if n != 2 {
        return Err(Error::WrongSessionDimension { expected: 2, got: n });
    }
    let c = 2.0f64.sqrt() / 2.0;
    let i = Complex::new(0.0, 1.0);
    let zero = Complex::new(0.0, 0.0);
    Immersion::new(
        2,
        "clifford",
        true,
        move |u1, u2| vec![c * exp_i(u1), c * exp_i(u2), zero],
        move |u1, u2| {
            (
                vec![i * c * exp_i(u1), zero, zero],
                vec![zero, i * c * exp_i(u2), zero],
            )
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    OffSphere,
    NonTangentDerivative,
    DegenerateMetric,
}

#[derive(Debug, Clone)]
pub struct ValidationIssue {
    pub kind: IssueKind,
    pub u1: f64,
    pub u2: f64,
    pub magnitude: f64,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let what = match self.kind {
            IssueKind::OffSphere => "off unit sphere by",
            IssueKind::NonTangentDerivative => "derivative non-tangent by",
            IssueKind::DegenerateMetric => "metric determinant",
        };
        write!(
            f,
            "{} {:.3e} at u = ({:.6}, {:.6})",
            what, self.magnitude, self.u1, self.u2
        )
    }
}

/// Worst violations found while scanning a parameter grid.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub resolution: usize,
    pub max_sphere_deviation: f64,
    pub max_tangency_deviation: f64,
    pub min_metric_det: f64,
    pub issues: Vec<ValidationIssue>,
    pub passed: bool,
}

/// Checks sphere membership, tangency of the derivatives and metric
/// nondegeneracy over a resolution x resolution grid. Failures are
/// reported, not thrown.
pub fn validate_immersion(imm: &Immersion, resolution: usize) -> ValidationReport {
    validate_immersion_with(imm, resolution, tolerances::ON_SPHERE)
}

pub fn validate_immersion_with(
    imm: &Immersion,
    resolution: usize,
    sphere_tol: f64,
) -> ValidationReport {
    let h = TAU / resolution as f64;
    let mut report = ValidationReport {
        resolution,
        max_sphere_deviation: 0.0,
        max_tangency_deviation: 0.0,
        min_metric_det: f64::INFINITY,
        issues: Vec::new(),
        passed: true,
    };
    let mut worst_sphere: Option<ValidationIssue> = None;
    let mut worst_tangent: Option<ValidationIssue> = None;
    let mut worst_metric: Option<ValidationIssue> = None;
    for i in 0..resolution {
        for j in 0..resolution {
            let (u1, u2) = (i as f64 * h, j as f64 * h);
            let z = imm.point(u1, u2);
            let (t1, t2) = imm.derivatives(u1, u2);
            let sphere_dev = if z.is_finite() { (z.norm_sq() - 1.0).abs() } else { f64::INFINITY };
            if sphere_dev > report.max_sphere_deviation {
                report.max_sphere_deviation = sphere_dev;
                if sphere_dev > sphere_tol {
                    worst_sphere = Some(ValidationIssue {
                        kind: IssueKind::OffSphere,
                        u1,
                        u2,
                        magnitude: sphere_dev,
                    });
                }
            }
            let tangency = rinner(&t1, &z).abs().max(rinner(&t2, &z).abs());
            if tangency > report.max_tangency_deviation {
                report.max_tangency_deviation = tangency;
                if tangency > tolerances::TANGENCY {
                    worst_tangent = Some(ValidationIssue {
                        kind: IssueKind::NonTangentDerivative,
                        u1,
                        u2,
                        magnitude: tangency,
                    });
                }
            }
            let g = MetricTensor {
                g11: rinner(&t1, &t1),
                g12: rinner(&t1, &t2),
                g22: rinner(&t2, &t2),
            };
            let det = if g.det().is_finite() { g.det() } else { f64::NEG_INFINITY };
            if det < report.min_metric_det {
                report.min_metric_det = det;
                if det <= tolerances::IMMERSION_FLOOR {
                    worst_metric = Some(ValidationIssue {
                        kind: IssueKind::DegenerateMetric,
                        u1,
                        u2,
                        magnitude: det,
                    });
                }
            }
        }
    }
    report.issues.extend(worst_sphere);
    report.issues.extend(worst_tangent);
    report.issues.extend(worst_metric);
    report.passed = report.issues.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn builtin_values_at_origin() {
        let c3 = 3.0f64.sqrt() / 3.0;
        let c2 = 2.0f64.sqrt() / 2.0;
        let leg = builtin_legendrian_torus(2).unwrap();
        let gen = builtin_generalized_clifford_torus(2).unwrap();
        let cli = builtin_clifford_torus(2).unwrap();
        for k in 0..3 {
            close(leg.point(0.0, 0.0).component(k).re, c3, 1e-15);
            close(leg.point(0.0, 0.0).component(k).im, 0.0, 1e-15);
            close(gen.point(0.0, 0.0).component(k).re, c3, 1e-15);
        }
        close(cli.point(0.0, 0.0).component(0).re, c2, 1e-15);
        close(cli.point(0.0, 0.0).component(1).re, c2, 1e-15);
        assert_eq!(cli.point(0.0, 0.0).component(2), Complex::new(0.0, 0.0));
    }

    #[test]
    fn builtins_require_n_two() {
        assert!(matches!(
            builtin_clifford_torus(1),
            Err(Error::WrongSessionDimension { expected: 2, got: 1 })
        ));
        assert!(builtin_legendrian_torus(1).is_err());
        assert!(builtin_generalized_clifford_torus(1).is_err());
    }

    #[test]
    fn induced_metrics_are_the_expected_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let leg = builtin_legendrian_torus(2).unwrap();
        let gen = builtin_generalized_clifford_torus(2).unwrap();
        let cli = builtin_clifford_torus(2).unwrap();
        for _ in 0..16 {
            let u1 = rng.gen_range(0.0..TAU);
            let u2 = rng.gen_range(0.0..TAU);
            let gl = induced_metric(&leg, u1, u2).unwrap();
            close(gl.g11, 2.0 / 3.0, 1e-14);
            close(gl.g12, 1.0 / 3.0, 1e-14);
            close(gl.g22, 2.0 / 3.0, 1e-14);
            let gg = induced_metric(&gen, u1, u2).unwrap();
            close(gg.g11, 2.0 / 3.0, 1e-14);
            close(gg.g12, -1.0 / 3.0, 1e-14);
            close(gg.g22, 2.0 / 3.0, 1e-14);
            let gc = induced_metric(&cli, u1, u2).unwrap();
            close(gc.g11, 0.5, 1e-14);
            close(gc.g12, 0.0, 1e-14);
            close(gc.g22, 0.5, 1e-14);
        }
    }

    #[test]
    fn builtins_are_unit_tangent_and_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for imm in [
            builtin_legendrian_torus(2).unwrap(),
            builtin_generalized_clifford_torus(2).unwrap(),
            builtin_clifford_torus(2).unwrap(),
        ] {
            for _ in 0..16 {
                let u1 = rng.gen_range(0.0..TAU);
                let u2 = rng.gen_range(0.0..TAU);
                let z = imm.point(u1, u2);
                close(z.norm_sq(), 1.0, 1e-14);
                let (t1, t2) = imm.derivatives(u1, u2);
                assert!(rinner(&t1, &z).abs() < 1e-12);
                assert!(rinner(&t2, &z).abs() < 1e-12);
                assert!(imm.point(u1 + TAU, u2).sub(&z).norm() < 1e-12);
                assert!(imm.point(u1, u2 + TAU).sub(&z).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_metric_is_an_error_with_location() {
        // depends only on u1: rank-1 Jacobian
        let imm = Immersion::new(
            2,
            "rank1",
            true,
            |u1, _| vec![exp_i(u1), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)],
            |u1, _| {
                (
                    vec![Complex::new(0.0, 1.0) * exp_i(u1), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)],
                    vec![Complex::new(0.0, 0.0); 3],
                )
            },
        )
        .unwrap();
        match induced_metric(&imm, 0.3, 0.4) {
            Err(Error::DegenerateMetric { u1, u2, .. }) => {
                assert_eq!((u1, u2), (0.3, 0.4));
            }
            other => panic!("expected degenerate metric, got {other:?}"),
        }
        let report = validate_immersion(&imm, 16);
        assert!(!report.passed);
        assert!(report.issues.iter().any(|i| i.kind == IssueKind::DegenerateMetric));
        assert!(report.issues.iter().any(|i| i.kind == IssueKind::OffSphere));
    }

    #[test]
    fn validation_passes_on_builtins() {
        for imm in [
            builtin_legendrian_torus(2).unwrap(),
            builtin_generalized_clifford_torus(2).unwrap(),
            builtin_clifford_torus(2).unwrap(),
        ] {
            let report = validate_immersion(&imm, 64);
            assert!(report.passed, "{report:?}");
            assert!(report.max_sphere_deviation < 1e-10);
            assert!(report.max_tangency_deviation < 1e-10);
        }
    }

    #[test]
    fn non_unit_surface_is_flagged() {
        let imm = Immersion::new(
            2,
            "scaled",
            true,
            |u1, _| vec![2.0 * exp_i(u1), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)],
            |u1, _| {
                (
                    vec![Complex::new(0.0, 2.0) * exp_i(u1), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)],
                    vec![Complex::new(0.0, 0.0); 3],
                )
            },
        )
        .unwrap();
        let report = validate_immersion(&imm, 8);
        assert!(report.issues.iter().any(|i| i.kind == IssueKind::OffSphere));
    }

    #[test]
    fn metric_symmetry_is_structural() {
        let gen = builtin_generalized_clifford_torus(2).unwrap();
        let (t1, t2) = gen.derivatives(0.7, 1.9);
        assert_eq!(rinner(&t1, &t2), rinner(&t2, &t1));
    }
}
