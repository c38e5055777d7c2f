//! Centralized numeric thresholds.
//!
//! Two families are kept strictly apart: *representation* tolerances for
//! analytically-defined inputs (rounding only) and *discretization*
//! tolerances for quantities that pass through grid finite differences.

/// Unit-sphere membership for analytic inputs.
pub const ON_SPHERE: f64 = 1e-12;

/// Tangency of immersion derivatives: |<df/du_i, f>|.
pub const TANGENCY: f64 = 1e-10;

/// Floor on det(g); below this a point is reported degenerate rather than
/// processed (frame construction divides by metric quantities).
pub const IMMERSION_FLOOR: f64 = 1e-8;

/// Below this value of sin(beta) the contact projection v (and with it the
/// Kähler angle) is undefined.
pub const SIN_BETA_FLOOR: f64 = 1e-7;

/// Within this distance of alpha = 0 or pi the adapted-frame denominators
/// 2 sin(alpha/2), 2 cos(alpha/2) degenerate and the axis-frame fallback is
/// used instead.
pub const ALPHA_FLOOR: f64 = 1e-7;

/// tan(beta)-weighted identities are skipped within this angular distance
/// of beta = pi/2.
pub const TAN_GUARD: f64 = 1e-6;

/// Relative size of the Reeb projections of both tangent directions below
/// which a point counts as legendrian (tangent plane inside the contact
/// distribution).
pub const LEGENDRIAN_TOL: f64 = 1e-9;

/// Frame orthonormality: max deviation of the Darboux Gram matrix from the
/// identity on analytic surfaces.
pub const ORTHONORMALITY: f64 = 1e-9;

/// |cos alpha| above which the e1 sign rule is driven by cos alpha >= 0;
/// below it the component-sign rule decides.
pub const E1_SIGN_COS_ALPHA: f64 = 1e-9;

/// Component magnitude that counts as "nonzero" in the e1 component-sign
/// rule.
pub const E1_SIGN_COMPONENT: f64 = 1e-9;

/// |cos beta| below which the e2 sign falls back to the orientation rule
/// (keeps the e2 field smooth on legendrian surfaces, where the
/// cos beta >= 0 rule would be decided by rounding noise).
pub const E2_SIGN_COS_BETA: f64 = 1e-9;

/// Additive floor of every identity tolerance.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

/// Identity tolerances are tol(N) = C * (2*pi/N)^4 + RESIDUAL_FLOOR with C
/// calibrated once against measured N=32 vs N=64 residuals and frozen.
///
/// Measured calibration points (max_abs / h^4):
///   gauss-full, legendrian torus:   0.067   -> C = 0.2 (3x margin)
///   laplacian (same FD ingredients) ->        C = 0.2
///   gauss-beta, curved oracle case: 1.07    -> C = 2.0
///   theta21, curved oracle case:    0.062   -> C = 1.0
pub const C_GAUSS_FULL: f64 = 0.2;
pub const C_GAUSS_BETA: f64 = 2.0;
pub const C_LAPLACIAN: f64 = 0.2;
pub const C_THETA21: f64 = 1.0;

/// Fixed threshold for the w12-vanishing check (the quantity is exactly
/// zero on its reference surface; 1e-8 leaves room for FD noise on DSL
/// transcriptions).
pub const W12_VANISHING_TOL: f64 = 1e-8;

/// Default sphere-membership tolerance when validating DSL-defined
/// surfaces (dual-number evaluation rounding).
pub const DSL_SPHERE: f64 = 1e-9;

/// tol(N) for the calibrated identities.
pub fn identity_tol(c: f64, resolution: usize) -> f64 {
    let h = std::f64::consts::TAU / resolution as f64;
    c * h.powi(4) + RESIDUAL_FLOOR
}
