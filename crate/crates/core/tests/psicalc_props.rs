use hilfer_core::psicalc::{
    kernel_l2_norm, psi_frac_integral, psi_hilfer_derivative, FracOrder, PsiFunction, PsiKind,
};
use hilfer_core::specfn::gamma_fn;
use proptest::prelude::*;

fn clock(kind: u8, b: f64) -> PsiFunction {
    match kind {
        0 => PsiFunction::linear(0.0, b).unwrap(),
        1 => PsiFunction::new(PsiKind::Power, &[2.0], 0.0, b).unwrap(),
        2 => PsiFunction::new(PsiKind::Exponential, &[0.7], 0.0, b).unwrap(),
        _ => PsiFunction::new(PsiKind::Logarithmic, &[1.0], 0.0, b).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_rule(kind in 0u8..4, alpha in 0.05f64..1.0, delta_ix in 0usize..3, frac in 0.05f64..1.0) {
        let delta = [1.0, 1.5, 2.0][delta_ix];
        let psi = clock(kind, 1.5);
        let t = 1.5 * frac;
        let got = psi_frac_integral(&psi, alpha, |s| psi.delta(s, 0.0).powf(delta - 1.0), t).unwrap();
        let p = psi.delta(t, 0.0);
        let want = gamma_fn(delta).unwrap() / gamma_fn(delta + alpha).unwrap() * p.powf(delta + alpha - 1.0);
        prop_assert!((got - want).abs() <= 1e-7 * want.abs().max(1e-300), "{got} vs {want}");
    }

    #[test]
    fn kernel_norm_closed_form_and_monotone(alpha in 0.51f64..1.0, slope in 0.2f64..3.0, frac in 0.1f64..1.0) {
        let psi = PsiFunction::new(PsiKind::Linear, &[slope], 0.0, 2.0).unwrap();
        let t = 2.0 * frac;
        let e = 2.0 * alpha - 1.0;
        let want = (slope * psi.delta(t, 0.0).powf(e) / e).sqrt();
        let got = kernel_l2_norm(&psi, alpha, t).unwrap();
        prop_assert!((got - want).abs() <= 1e-8 * want);
        let later = kernel_l2_norm(&psi, alpha, (t + 0.1).min(2.0)).unwrap();
        prop_assert!(later >= got);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn semigroup(kind in 0u8..4, a1 in 0.1f64..1.0, a2 in 0.1f64..1.0, frac in 0.1f64..1.0) {
        let psi = clock(kind, 1.0);
        let t = frac;
        let f = |s: f64| (psi.value(s)).cos() + s;
        let inner = |s: f64| psi_frac_integral(&psi, a2, f, s).unwrap();
        let composed = psi_frac_integral(&psi, a1, inner, t).unwrap();
        let direct = psi_frac_integral(&psi, a1 + a2, f, t).unwrap();
        prop_assert!((composed - direct).abs() <= 1e-6 * direct.abs().max(1.0), "{composed} vs {direct}");
    }

    #[test]
    fn hilfer_annihilates_its_weight(kind in 0u8..4, alpha in 0.55f64..0.98, beta in 0.0f64..1.0, frac in 0.2f64..0.9) {
        let psi = clock(kind, 1.0);
        let order = FracOrder::new(alpha, beta).unwrap();
        let g = order.gamma();
        let d = psi_hilfer_derivative(&psi, order, |s| psi.delta(s, 0.0).powf(g - 1.0), frac).unwrap();
        prop_assert!(d.abs() <= 1e-4, "{d}");
    }
}

#[test]
fn hilfer_left_inverse() {
    for (kind, alpha, beta) in [(0u8, 0.75, 0.5), (1, 0.6, 0.2), (3, 0.9, 0.8), (2, 0.7, 0.0)] {
        let psi = clock(kind, 1.0);
        let order = FracOrder::new(alpha, beta).unwrap();
        let g = |s: f64| psi.value(s).sin();
        let f = |s: f64| psi_frac_integral(&psi, alpha, g, s).unwrap();
        for t in [0.3, 0.7, 1.0] {
            let d = psi_hilfer_derivative(&psi, order, f, t).unwrap();
            assert!((d - g(t)).abs() <= 1e-4, "kind {kind} alpha {alpha} t {t}: {d} vs {}", g(t));
        }
    }
}

#[test]
fn caputo_type_agrees_with_caputo_derivative() {
    // β = 1 is the ψ-Caputo derivative; on Ψ² (vanishing at a) it is Γ(3)/Γ(3−α) Ψ^{2−α}
    for kind in 0u8..4 {
        let psi = clock(kind, 1.0);
        for alpha in [0.6, 0.8] {
            let order = FracOrder::new(alpha, 1.0).unwrap();
            for t in [0.4, 0.9] {
                let d = psi_hilfer_derivative(&psi, order, |s| psi.delta(s, 0.0).powi(2), t).unwrap();
                let want = 2.0 / gamma_fn(3.0 - alpha).unwrap() * psi.delta(t, 0.0).powf(2.0 - alpha);
                assert!((d - want).abs() <= 1e-5, "kind {kind} alpha {alpha}: {d} vs {want}");
            }
        }
    }
}

#[test]
fn kernel_norm_grows_toward_the_gate() {
    let psi = PsiFunction::linear(0.0, 1.0).unwrap();
    assert!(kernel_l2_norm(&psi, 0.51, 1.0).unwrap() > kernel_l2_norm(&psi, 0.75, 1.0).unwrap());
}
