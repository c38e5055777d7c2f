use super::*;
use crate::surface::builtin_generalized_clifford_torus;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GEN_CLIFFORD_DSL: &str =
    "sqrt(3)/3 * exp(i*u1), sqrt(3)/3 * exp(i*u2), sqrt(3)/3 * exp(i*(u2-u1))";

#[test]
fn parses_three_component_surface() {
    let s = parse_surface(GEN_CLIFFORD_DSL).unwrap();
    assert_eq!(s.components.len(), 3);
    assert!(s.periodic);
}

#[test]
fn unknown_identifier_is_an_error() {
    let err = parse_surface("u3").unwrap_err();
    assert!(err.message.contains("unknown identifier 'u3'"), "{err}");
}

#[test]
fn syntax_error_at_end_of_input() {
    let err = parse_surface("exp(").unwrap_err();
    assert!(err.message.contains("end of input"), "{err}");
}

#[test]
fn empty_input_is_an_error() {
    assert!(parse_surface("").is_err());
    assert!(parse_surface("# only a comment\n").is_err());
}

#[test]
fn operator_precedence() {
    use SurfaceExpr::*;
    assert_eq!(
        parse_expr("u1+u2*pi").unwrap(),
        Add(Box::new(U1), Box::new(Mul(Box::new(U2), Box::new(Pi))))
    );
    assert_eq!(
        parse_expr("-u1^2").unwrap(),
        Neg(Box::new(Pow(Box::new(U1), 2)))
    );
    // parenthesized base
    assert_eq!(
        parse_expr("(-u1)^2").unwrap(),
        Pow(Box::new(Neg(Box::new(U1))), 2)
    );
}

#[test]
fn header_and_comments() {
    let text = "# a comment\nperiodic: false\n(exp(i*u1), exp(i*u2))";
    let s = parse_surface(text).unwrap();
    assert!(!s.periodic);
    assert_eq!(s.components.len(), 2);

    let bad = parse_surface("periodic: maybe\nu1, u2").unwrap_err();
    assert!(bad.message.contains("true or false"));
}

#[test]
fn wrapping_parens_only_stripped_for_tuples() {
    // single parenthesized expression stays one component
    let s = parse_surface("(u1 + u2)").unwrap();
    assert_eq!(s.components.len(), 1);
    // parens that close mid-way are not wrapping
    let s = parse_surface("(u1 + u2), u1").unwrap();
    assert_eq!(s.components.len(), 2);
}

#[test]
fn dual_chain_rule_examples() {
    let e = parse_expr("exp(i*u1)").unwrap();
    let d = evaluate_dual(&e, 0.0, 0.0).unwrap();
    assert!((d.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    assert!((d.du1 - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert_eq!(d.du2, Complex64::new(0.0, 0.0));

    let e = parse_expr("u1*u2").unwrap();
    let d = evaluate_dual(&e, 2.0, 3.0).unwrap();
    assert_eq!(d.value, Complex64::new(6.0, 0.0));
    assert_eq!(d.du1, Complex64::new(3.0, 0.0));
    assert_eq!(d.du2, Complex64::new(2.0, 0.0));
}

#[test]
fn division_by_zero_reports_position_through_nan() {
    let imm = immersion_from_dsl("1/(u1 - u1), u1, u2", 2).unwrap();
    assert!(!imm.point(0.5, 0.5).is_finite());
    assert!(!imm.warnings().is_empty());
}

#[test]
fn dsl_matches_analytic_builtin_evaluator() {
    let imm = immersion_from_dsl(GEN_CLIFFORD_DSL, 2).unwrap();
    assert!(imm.warnings().is_empty(), "{:?}", imm.warnings());
    let builtin = builtin_generalized_clifford_torus(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..25 {
        let u1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let u2 = rng.gen_range(0.0..std::f64::consts::TAU);
        assert!(imm.point(u1, u2).sub(&builtin.point(u1, u2)).norm() < 1e-12);
        let (a1, a2) = imm.derivatives(u1, u2);
        let (b1, b2) = builtin.derivatives(u1, u2);
        assert!(a1.sub(&b1).norm() < 1e-12);
        assert!(a2.sub(&b2).norm() < 1e-12);
    }
}

#[test]
fn wrong_component_count_is_an_error() {
    assert!(matches!(
        immersion_from_dsl("u1, u2", 2),
        Err(crate::error::Error::ComponentCount { expected: 3, got: 2, .. })
    ));
}

#[test]
fn non_unit_surface_carries_warning() {
    let imm = immersion_from_dsl("2*exp(i*u1), 0, 0", 2).unwrap();
    assert!(imm.warnings().iter().any(|w| w.contains("off unit sphere")));
}

// ------------------------------------------------ random expression corpus

fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> SurfaceExpr {
    use SurfaceExpr::*;
    if depth == 0 {
        return match rng.gen_range(0..5) {
            0 => Num((rng.gen_range(1..40) as f64) / 8.0),
            1 => ImaginaryUnit,
            2 => Pi,
            3 => U1,
            _ => U2,
        };
    }
    match rng.gen_range(0..10) {
        0 => Neg(Box::new(random_expr(rng, depth - 1))),
        1 | 2 => Add(Box::new(random_expr(rng, depth - 1)), Box::new(random_expr(rng, depth - 1))),
        3 => Sub(Box::new(random_expr(rng, depth - 1)), Box::new(random_expr(rng, depth - 1))),
        4 | 5 => Mul(Box::new(random_expr(rng, depth - 1)), Box::new(random_expr(rng, depth - 1))),
        6 => Div(Box::new(random_expr(rng, depth - 1)), Box::new(random_expr(rng, depth - 1))),
        7 => Pow(Box::new(random_expr(rng, depth - 1)), rng.gen_range(0..4)),
        _ => Call(
            match rng.gen_range(0..5) {
                0 => Func::Exp,
                1 => Func::Sin,
                2 => Func::Cos,
                3 => Func::Sqrt,
                _ => Func::Conj,
            },
            Box::new(random_expr(rng, depth - 1)),
        ),
    }
}

const CORPUS_POINTS: [(f64, f64); 3] = [(0.37, 1.21), (2.9, 0.63), (4.4, 5.1)];

/// Rejects expressions whose evaluation is near a singularity or too large
/// for a meaningful finite-difference comparison.
fn tame(expr: &SurfaceExpr) -> bool {
    for &(u1, u2) in &CORPUS_POINTS {
        for du in [-2e-5, 0.0, 2e-5] {
            match evaluate_dual(expr, u1 + du, u2 + du) {
                Ok(d) => {
                    let m = d.value.norm().max(d.du1.norm()).max(d.du2.norm());
                    if !(m.is_finite() && m < 50.0) {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        if !stays_away_from_branch_points(expr, u1, u2) {
            return false;
        }
    }
    true
}

fn stays_away_from_branch_points(expr: &SurfaceExpr, u1: f64, u2: f64) -> bool {
    match expr {
        SurfaceExpr::Call(Func::Sqrt, a) => {
            // keep the argument off the branch cut so central differences
            // straddle a smooth region
            match evaluate_dual(a, u1, u2) {
                Ok(d) => {
                    (d.value.norm() > 0.3 && (d.value.re > 0.05 || d.value.im.abs() > 0.05))
                        && stays_away_from_branch_points(a, u1, u2)
                }
                Err(_) => false,
            }
        }
        SurfaceExpr::Div(a, b) => {
            let ok_b = matches!(evaluate_dual(b, u1, u2), Ok(d) if d.value.norm() > 0.2);
            ok_b && stays_away_from_branch_points(a, u1, u2)
                && stays_away_from_branch_points(b, u1, u2)
        }
        SurfaceExpr::Neg(a) | SurfaceExpr::Pow(a, _) | SurfaceExpr::Call(_, a) => {
            stays_away_from_branch_points(a, u1, u2)
        }
        SurfaceExpr::Add(a, b) | SurfaceExpr::Sub(a, b) | SurfaceExpr::Mul(a, b) => {
            stays_away_from_branch_points(a, u1, u2)
                && stays_away_from_branch_points(b, u1, u2)
        }
        _ => true,
    }
}

fn corpus() -> Vec<SurfaceExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    while out.len() < 50 {
        let e = random_expr(&mut rng, 4);
        if tame(&e) {
            out.push(e);
        }
    }
    out
}

#[test]
fn corpus_round_trips_through_serialization() {
    for e in corpus() {
        let text = e.to_string();
        let back = parse_expr(&text).unwrap_or_else(|err| panic!("'{text}': {err}"));
        assert_eq!(back, e, "serialized form '{text}'");
        // serialize -> parse -> serialize is a fixed point
        assert_eq!(back.to_string(), text);
    }
}

#[test]
fn dual_derivatives_match_central_differences() {
    let h = 1e-5;
    for e in corpus() {
        for &(u1, u2) in &CORPUS_POINTS {
            let d = evaluate_dual(&e, u1, u2).unwrap();
            let fd1 = (evaluate_dual(&e, u1 + h, u2).unwrap().value
                - evaluate_dual(&e, u1 - h, u2).unwrap().value)
                / (2.0 * h);
            let fd2 = (evaluate_dual(&e, u1, u2 + h).unwrap().value
                - evaluate_dual(&e, u1, u2 - h).unwrap().value)
                / (2.0 * h);
            let scale = 1.0f64.max(d.du1.norm()).max(d.du2.norm());
            assert!(
                (d.du1 - fd1).norm() / scale < 1e-8,
                "du1 mismatch for '{e}': {} vs {}",
                d.du1,
                fd1
            );
            assert!(
                (d.du2 - fd2).norm() / scale < 1e-8,
                "du2 mismatch for '{e}': {} vs {}",
                d.du2,
                fd2
            );
        }
    }
}
