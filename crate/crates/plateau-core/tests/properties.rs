//! Property tests for the spec-level invariants: tensor multilinearity and
//! rotation invariance, exchange symmetry, coupling scaling, shell
//! linearity and cutoff independence, and the smooth-to-step trend.

use plateau_core::tensor::{EpsContraction, Vec4, eps_contract};
use plateau_core::triangle::{
    TriangleConfig, anomaly_assemble, axial_direct_integrand, axial_exchange_integrand,
    shell_reduction, vector_divergence_mc, vector_divergence_step_oracle,
};
use proptest::prelude::*;

fn vec4_strategy() -> impl Strategy<Value = Vec4> {
    [
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
    ]
    .prop_map(Vec4)
}

fn momentum_strategy() -> impl Strategy<Value = Vec4> {
    [
        -0.4f64..0.4,
        -0.4f64..0.4,
        -0.4f64..0.4,
        -0.4f64..0.4,
    ]
    .prop_map(Vec4)
}

fn scalar_eps(a: Vec4, b: Vec4, c: Vec4, d: Vec4) -> f64 {
    match eps_contract(&[a, b, c, d]) {
        EpsContraction::Scalar(s) => s,
        _ => unreachable!("four vectors contract to a scalar"),
    }
}

/// Rotation in the (i, j) plane by angle t.
fn givens(i: usize, j: usize, t: f64) -> impl Fn(Vec4) -> Vec4 {
    move |mut v: Vec4| {
        let (c, s) = (t.cos(), t.sin());
        let (a, b) = (v[i], v[j]);
        v[i] = c * a - s * b;
        v[j] = s * a + c * b;
        v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eps_contract_is_multilinear(
        a in vec4_strategy(),
        b in vec4_strategy(),
        c in vec4_strategy(),
        d in vec4_strategy(),
        e in vec4_strategy(),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let lhs = scalar_eps(a * alpha + e * beta, b, c, d);
        let rhs = alpha * scalar_eps(a, b, c, d) + beta * scalar_eps(e, b, c, d);
        let scale = b.norm() * c.norm() * d.norm() * (a.norm() * alpha.abs() + e.norm() * beta.abs()) + 1.0;
        prop_assert!((lhs - rhs).abs() < 1e-12 * scale);
    }

    #[test]
    fn eps_contract_rotation_invariant(
        a in vec4_strategy(),
        b in vec4_strategy(),
        c in vec4_strategy(),
        d in vec4_strategy(),
        t1 in 0.0f64..std::f64::consts::TAU,
        t2 in 0.0f64..std::f64::consts::TAU,
        t3 in 0.0f64..std::f64::consts::TAU,
    ) {
        let rot = |v: Vec4| givens(2, 3, t3)(givens(1, 2, t2)(givens(0, 1, t1)(v)));
        let before = scalar_eps(a, b, c, d);
        let after = scalar_eps(rot(a), rot(b), rot(c), rot(d));
        let scale = a.norm() * b.norm() * c.norm() * d.norm() + 1.0;
        prop_assert!((before - after).abs() < 1e-12 * scale);
        // Dot products are rotation invariant as well.
        prop_assert!((a.dot(b) - rot(a).dot(rot(b))).abs() < 1e-12 * scale);
    }

    #[test]
    fn exchange_rule_pointwise(
        p1 in momentum_strategy(),
        p2 in momentum_strategy(),
        k in vec4_strategy(),
    ) {
        let cfg = TriangleConfig::new(p1, p2, 10.0, 0.5).unwrap();
        let mut swapped = cfg;
        swapped.p1 = p2;
        swapped.p2 = p1;
        let k = k * 5.0;
        if let (Some(direct), Some(exch)) = (
            axial_direct_integrand(k, &swapped),
            axial_exchange_integrand(k, &cfg),
        ) {
            // The exchange integrand of cfg is the direct integrand with
            // momenta swapped and indices transposed.
            prop_assert!((direct.transpose() - exch).max_abs() < 1e-14);
        }
    }

    #[test]
    fn coupling_scaling_is_exact(
        p1 in momentum_strategy(),
        p2 in momentum_strategy(),
        e in 0.1f64..3.0,
    ) {
        let mut unit = TriangleConfig::new(p1, p2, 10.0, 0.5).unwrap();
        unit.coupling = 1.0;
        let mut scaled = unit;
        scaled.coupling = e;
        let ru = anomaly_assemble(&unit).unwrap();
        let rs = anomaly_assemble(&scaled).unwrap();
        let e2 = e * e;
        let tol = 1e-12 * (ru.total_coefficient.abs() + 1e-30) * e2;
        prop_assert!((rs.total_coefficient - e2 * ru.total_coefficient).abs() <= tol.max(1e-18));
        prop_assert!(
            (rs.vector_defect.coefficient - e2 * ru.vector_defect.coefficient).abs()
                <= tol.max(1e-18)
        );
    }

    #[test]
    fn shell_reduction_linear_and_cutoff_independent(
        t in -0.9f64..0.9,
        alpha in 0.1f64..1.0,
    ) {
        let mut p = Vec4::ZERO;
        p[2] = t;
        let base = shell_reduction(p, 2, 10.0).unwrap();
        let scaled = shell_reduction(p * alpha, 2, 10.0).unwrap();
        prop_assert!((scaled - alpha * base).abs() < 1e-12 * (base.abs() + 1e-30));
        let other = shell_reduction(p, 2, 20.0).unwrap();
        prop_assert!((other - base).abs() <= 1e-10 * (base.abs() + 1e-30));
    }
}

/// Smooth-to-step convergence: halving the rolloff width walks the literal
/// smooth-regulator MC toward the step-limit oracle.
#[test]
fn smooth_to_step_trend() {
    let p1 = Vec4::new(0.6, 0.0, 0.4, 0.0);
    let p2 = Vec4::new(0.0, 0.5, 0.0, -0.3);
    let step = vector_divergence_step_oracle(
        &TriangleConfig::new(p1, p2, 10.0, 0.2).unwrap(),
    )
    .coefficient;
    let mut prev_dist = f64::INFINITY;
    let mut prev_sigma = 0.0;
    for (i, w) in [0.8, 0.4, 0.2].into_iter().enumerate() {
        let mut cfg = TriangleConfig::new(p1, p2, 10.0, w).unwrap();
        cfg.mc_samples = 1_000_000;
        cfg.seed = 400 + i as u64;
        cfg.workers = 4;
        let mc = vector_divergence_mc(&cfg).unwrap();
        let dist = (mc.coefficient - step).abs();
        assert!(
            dist <= prev_dist + 3.0 * (mc.coefficient_error + prev_sigma),
            "width {w}: distance {dist:.3e} grew beyond {prev_dist:.3e}"
        );
        prev_dist = dist;
        prev_sigma = mc.coefficient_error;
    }
    // The narrowest width must already be within 15% of the step value.
    assert!(
        prev_dist < 0.15 * step.abs(),
        "width 0.2 still {prev_dist:.3e} from step value {step:.3e}"
    );
}
