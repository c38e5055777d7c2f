//! Per-point contact-adapted frames: the oriented tangent frame with
//! e1 in TS ∩ Δ, the contact angle beta, the contact projection v, the
//! Kähler angle alpha, the adapted unitary frame and the Darboux frame.
//!
//! Sign conventions are deterministic so that grid builds are reproducible:
//! e2 is oriented so cos(beta) >= 0 (orientation of the parametrization
//! decides when |cos beta| is at rounding level), and e1 so cos(alpha) >= 0
//! when that is meaningful, falling back to a component-sign rule. All
//! derived identity quantities are invariant under the residual sign
//! freedom; grid differentiation aligns window samples to the center via
//! [`FrameSample::flipped`].

use std::f64::consts::PI;

use crate::ambient::{rinner, AmbientVector};
use crate::error::{Error, Result};
use crate::surface::{induced_metric, Immersion, MetricTensor};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMode {
    /// Adapted unitary frame from e1 and v (alpha away from 0 and pi).
    Regular,
    /// Axis frame f1 = e1, f_{n+1} = i e1, with a deterministic complex
    /// completion for the remaining direction (used when alpha is within
    /// the floor of 0/pi, when v is undefined, and always for n = 1).
    Fallback,
}

/// Everything the frame construction determines at one parameter point.
#[derive(Debug, Clone)]
pub struct FrameSample {
    pub u: (f64, f64),
    pub point: AmbientVector,
    pub reeb: AmbientVector,
    pub metric: MetricTensor,
    pub e1: AmbientVector,
    pub e2: AmbientVector,
    /// <xi, e2>; negative only on sign-aligned copies.
    pub cos_beta: f64,
    /// |e2 - cos_beta * xi|, always >= 0.
    pub sin_beta: f64,
    /// atan2(sin_beta, cos_beta); in [0, pi/2] for default-built frames.
    pub beta: f64,
    /// Normalized contact projection of e2; None when sin_beta is under
    /// the floor.
    pub v: Option<AmbientVector>,
    /// <i e1, v>.
    pub cos_alpha: Option<f64>,
    /// arccos of the clamped cos_alpha.
    pub alpha: Option<f64>,
    pub legendrian: bool,
    pub mode: FrameMode,
    /// First unitary frame vector; equals e1 in fallback mode.
    pub f1: AmbientVector,
    /// Second unitary frame vector (None for n = 1).
    pub f2: Option<AmbientVector>,
    /// (e1, e2, normals...): 2n+1 pairwise orthonormal vectors.
    pub darboux: Vec<AmbientVector>,
    n: usize,
}

impl FrameSample {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Normal part of the Darboux frame (e_3.. for n = 2, e_3 for n = 1).
    pub fn normals(&self) -> &[AmbientVector] {
        &self.darboux[2..]
    }

    /// The real orthonormal basis (f_1..f_n, i f_1..i f_n, xi) of the
    /// tangent space of the sphere at this point.
    pub fn unitary_real_basis(&self) -> Vec<AmbientVector> {
        let mut basis = vec![self.f1.clone()];
        if let Some(f2) = &self.f2 {
            basis.push(f2.clone());
        }
        basis.push(self.f1.times_i());
        if let Some(f2) = &self.f2 {
            basis.push(f2.times_i());
        }
        basis.push(self.reeb.clone());
        basis
    }

    /// Rebuilds the frame with e1 and/or e2 negated. Used to make stencil
    /// windows gauge-coherent before differencing frame fields.
    pub fn flipped(&self, flip_e1: bool, flip_e2: bool) -> FrameSample {
        if !flip_e1 && !flip_e2 {
            return self.clone();
        }
        let e1 = if flip_e1 { self.e1.scaled(-1.0) } else { self.e1.clone() };
        let e2 = if flip_e2 { self.e2.scaled(-1.0) } else { self.e2.clone() };
        build_frame(
            self.n,
            self.u,
            self.point.clone(),
            self.reeb.clone(),
            self.metric,
            e1,
            e2,
            self.legendrian,
        )
    }

    /// Max deviation of the Darboux Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.darboux.iter().enumerate() {
            for (j, b) in self.darboux.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((rinner(a, b) - expect).abs());
            }
        }
        worst
    }
}

/// Deterministic unit vector Hermitian-orthogonal to z and f1 (n = 2 only).
fn complex_completion(z: &AmbientVector, f1: &AmbientVector) -> Option<AmbientVector> {
    if z.len() != 3 {
        return None;
    }
    for k in 0..3 {
        let mut b = AmbientVector::zeros(3);
        {
            let mut comps: Vec<_> = b.components().to_vec();
            comps[k] = num_complex::Complex64::new(1.0, 0.0);
            b = AmbientVector::new(comps);
        }
        let pz = crate::ambient::hermitian_product(&b, z).expect("dims");
        let pf = crate::ambient::hermitian_product(&b, f1).expect("dims");
        let p = b.sub(&z.scaled_complex(pz)).sub(&f1.scaled_complex(pf));
        let norm = p.norm();
        if norm > 0.5 {
            return Some(p.scaled(1.0 / norm));
        }
    }
    None
}

/// Core constructor: everything downstream of the signed (e1, e2) pair.
#[allow(clippy::too_many_arguments)]
fn build_frame(
    n: usize,
    u: (f64, f64),
    z: AmbientVector,
    xi: AmbientVector,
    metric: MetricTensor,
    e1: AmbientVector,
    e2: AmbientVector,
    legendrian: bool,
) -> FrameSample {
    let cos_beta = rinner(&xi, &e2);
    let proj = e2.axpy(-cos_beta, &xi);
    let sin_beta = proj.norm();
    let beta = sin_beta.atan2(cos_beta);
    let v = (sin_beta >= tolerances::SIN_BETA_FLOOR).then(|| proj.scaled(1.0 / sin_beta));
    let cos_alpha = v.as_ref().map(|v| rinner(&e1.times_i(), v));
    let alpha = cos_alpha.map(|c| c.clamp(-1.0, 1.0).acos());

    let regular = n == 2
        && matches!(alpha, Some(a) if a > tolerances::ALPHA_FLOOR && a < PI - tolerances::ALPHA_FLOOR);

    let (mode, f1, f2) = if regular {
        let a = alpha.unwrap();
        let v = v.as_ref().unwrap();
        let iv = v.times_i();
        let f1 = e1.sub(&iv).scaled(0.5 / (a / 2.0).cos());
        let f2 = e1.add(&iv).scaled(0.5 / (a / 2.0).sin());
        (FrameMode::Regular, f1, Some(f2))
    } else {
        let f2 = if n == 2 { complex_completion(&z, &e1) } else { None };
        (FrameMode::Fallback, e1.clone(), f2)
    };

    let darboux = match mode {
        FrameMode::Regular => {
            let a = alpha.unwrap();
            let (ca2, sa2) = ((a / 2.0).cos(), (a / 2.0).sin());
            let f2v = f2.as_ref().unwrap();
            let f3 = f1.times_i();
            let f4 = f2v.times_i();
            let e3 = f1.scaled(sa2).sub(&f2v.scaled(ca2));
            let e4 = f3.scaled(sa2).add(&f4.scaled(ca2));
            let vdir = f3.scaled(ca2).sub(&f4.scaled(sa2));
            let e5 = vdir.scaled(-cos_beta).axpy(sin_beta, &xi);
            vec![e1.clone(), e2.clone(), e3, e4, e5]
        }
        FrameMode::Fallback => {
            let sgn = match cos_alpha {
                Some(c) if c < 0.0 => -1.0,
                _ => 1.0,
            };
            let f3 = f1.times_i();
            let e_last = f3.scaled(-cos_beta * sgn).axpy(sin_beta, &xi);
            if n == 2 {
                let f2v = f2.clone().expect("completion exists in C^3");
                vec![e1.clone(), e2.clone(), f2v.clone(), f2v.times_i(), e_last]
            } else {
                vec![e1.clone(), e2.clone(), e_last]
            }
        }
    };

    FrameSample {
        u,
        point: z,
        reeb: xi,
        metric,
        e1,
        e2,
        cos_beta,
        sin_beta,
        beta,
        v,
        cos_alpha,
        alpha,
        legendrian,
        mode,
        f1,
        f2,
        darboux,
        n,
    }
}

fn component_sign(e1: &AmbientVector) -> f64 {
    for c in e1.components() {
        if c.re.abs() > tolerances::E1_SIGN_COMPONENT {
            return c.re.signum();
        }
        if c.im.abs() > tolerances::E1_SIGN_COMPONENT {
            return c.im.signum();
        }
    }
    1.0
}

/// Full frame construction at a parameter point with the deterministic
/// default sign rules.
pub fn frame_at(imm: &Immersion, u1: f64, u2: f64) -> Result<FrameSample> {
    let z = imm.point(u1, u2);
    if !z.is_finite() {
        return Err(Error::DegenerateFrame {
            u1,
            u2,
            detail: "immersion evaluated to a non-finite point".into(),
        });
    }
    let metric = induced_metric(imm, u1, u2)?;
    let (t1, t2) = imm.derivatives(u1, u2);
    let xi = z.times_i();
    let c1 = rinner(&t1, &xi);
    let c2 = rinner(&t2, &xi);
    let ell = (c1.abs() / metric.g11.sqrt()).max(c2.abs() / metric.g22.sqrt());
    let legendrian = ell < tolerances::LEGENDRIAN_TOL;

    let e1_dir = if legendrian {
        t1.scaled(1.0 / metric.g11.sqrt())
    } else {
        let d = t1.scaled(c2).axpy(-c1, &t2);
        let norm = d.norm();
        if norm < 1e-30 {
            return Err(Error::DegenerateFrame {
                u1,
                u2,
                detail: "contact-tangent direction vanished".into(),
            });
        }
        d.scaled(1.0 / norm)
    };

    // oriented orthonormal completion of e1 in the tangent plane
    let mut y = t2.axpy(-rinner(&t2, &e1_dir), &e1_dir);
    if y.norm_sq() < metric.g22 * 1e-20 {
        y = t1.axpy(-rinner(&t1, &e1_dir), &e1_dir);
    }
    let mut e2 = y.scaled(1.0 / y.norm());
    let orient = rinner(&t1, &e1_dir) * rinner(&t2, &e2) - rinner(&t1, &e2) * rinner(&t2, &e1_dir);
    if orient < 0.0 {
        e2 = e2.scaled(-1.0);
    }
    let cb = rinner(&xi, &e2);
    if cb < -tolerances::E2_SIGN_COS_BETA {
        e2 = e2.scaled(-1.0);
    }

    // e1 sign: cos(alpha) >= 0 where meaningful, component rule otherwise
    let proj = e2.axpy(-rinner(&xi, &e2), &xi);
    let sin_beta = proj.norm();
    let sign = if sin_beta >= tolerances::SIN_BETA_FLOOR {
        let ca = rinner(&e1_dir.times_i(), &proj.scaled(1.0 / sin_beta));
        if ca.abs() > tolerances::E1_SIGN_COS_ALPHA {
            ca.signum()
        } else {
            component_sign(&e1_dir)
        }
    } else {
        component_sign(&e1_dir)
    };
    let e1 = e1_dir.scaled(sign);

    Ok(build_frame(imm.n(), (u1, u2), z, xi, metric, e1, e2, legendrian))
}

/// The oriented orthonormal tangent pair (e1, e2) with e1 in TS ∩ Δ.
///
/// In strict mode a legendrian point (tangent plane inside Δ, where the
/// choice of e1 is a whole circle) is an error; by default the sample is
/// built with e1 along the metric-normalized first coordinate direction
/// and flagged.
pub fn tangent_contact_frame(
    imm: &Immersion,
    u1: f64,
    u2: f64,
    strict: bool,
) -> Result<(AmbientVector, AmbientVector)> {
    let sample = frame_at(imm, u1, u2)?;
    if strict && sample.legendrian {
        return Err(Error::LegendrianAmbiguity { u1, u2 });
    }
    Ok((sample.e1, sample.e2))
}

/// Contact angle in [0, pi/2] for default-built frames.
pub fn contact_angle(sample: &FrameSample) -> f64 {
    sample.beta
}

/// Kähler angle; None below the sin(beta) floor.
pub fn kahler_angle(sample: &FrameSample) -> Option<f64> {
    sample.alpha
}

/// Max absolute deviation of the coframe components w^λ(e_a) = <e_a, f_λ>
/// from the restriction table: w^1(e1) = cos(α/2), w^2(e1) = sin(α/2),
/// w^{n+1}(e2) = cos(α/2) sin β, w^{n+2}(e2) = -sin(α/2) sin β,
/// w^{2n+1}(e2) = cos β, all other entries zero. Fallback frames use
/// their effective α ∈ {0, π}.
pub fn coframe_restriction_check(sample: &FrameSample) -> f64 {
    let n = sample.n;
    let basis = sample.unitary_real_basis();
    let (alpha_eff, sgn) = match sample.mode {
        FrameMode::Regular => (sample.alpha.expect("regular frames carry alpha"), 1.0),
        FrameMode::Fallback => match sample.cos_alpha {
            Some(c) if c < 0.0 => (PI, -1.0),
            _ => (0.0, 1.0),
        },
    };
    let (ca2, sa2) = ((alpha_eff / 2.0).cos(), (alpha_eff / 2.0).sin());
    let (sb, cb) = (sample.sin_beta, sample.cos_beta);
    let mut expected = vec![[0.0f64; 2]; basis.len()];
    // basis order: f_1..f_n, f_{n+1}..f_{2n}, xi
    expected[0][0] = ca2;
    if n == 2 {
        expected[1][0] = sa2;
        expected[2][1] = ca2 * sb * sgn;
        expected[3][1] = -sa2 * sb;
        expected[4][1] = cb;
    } else {
        expected[1][1] = ca2 * sb * sgn;
        expected[2][1] = cb;
    }
    let mut worst: f64 = 0.0;
    for (lam, f) in basis.iter().enumerate() {
        for (a, e) in [&sample.e1, &sample.e2].into_iter().enumerate() {
            worst = worst.max((rinner(e, f) - expected[lam][a]).abs());
        }
    }
    worst
}
