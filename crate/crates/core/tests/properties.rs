use hardy_core::catalog::{evaluate, CaseId, ParamSet};
use hardy_core::functionals::{c_p_constant, r_p_weighted};
use hardy_core::jet::Jet;
use hardy_core::manifold::{ManifoldModel, Region, WarpedProfile};
use hardy_core::prober::{generate_corpus, CorpusSpec};
use hardy_core::quadrature::QuadratureSpec;
use hardy_core::radial::RadialFunction;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

/// `x ↦ f(λx)` with its jet from the chain rule.
fn dilate(f: &RadialFunction, lambda: f64) -> RadialFunction {
    let (lo, hi) = f.support().bounds();
    let g = f.clone();
    RadialFunction::from_jet(
        format!("{}(x{lambda})", f.label()),
        Region::Annulus {
            inner: lo / lambda,
            outer: hi / lambda,
        },
        4,
        move |r, o| {
            let inner = g.jet(lambda * r, o).expect("analytic corpus jet");
            let d: Vec<Complex64> = (0..=o).map(|k| inner.derivative(k)).collect();
            (Jet::variable(r, o) * lambda).compose(&d)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn r_p_nonnegative_complex(p in 2.0..6.0f64, z in complex(), e in complex()) {
        let v = r_p_weighted(p, z, e).unwrap();
        let scale = z.norm().powf(p) + e.norm().powf(p);
        prop_assert!(v >= -1e-13 * scale.max(1.0));
    }

    #[test]
    fn r_p_nonnegative_real(p in 1.01..2.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64) {
        let v = r_p_weighted(p, Complex64::new(a, 0.0), Complex64::new(b, 0.0)).unwrap();
        let scale = a.abs().powf(p) + b.abs().powf(p);
        prop_assert!(v >= -1e-13 * scale.max(1.0));
    }

    #[test]
    fn r_p_vanishes_on_the_diagonal(p in 1.1..5.0f64, z in complex()) {
        let v = r_p_weighted(p, z, z).unwrap();
        prop_assert!(v.abs() <= 1e-12 * z.norm().powf(p).max(1.0));
    }

    #[test]
    fn c_p_is_continuous_and_bounded(p in 2.0..8.0f64) {
        let a = c_p_constant(p).unwrap();
        let b = c_p_constant(p + 1e-4).unwrap();
        prop_assert!((a - b).abs() < 1e-3);
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-12);
    }

    #[test]
    fn density_is_nondecreasing(r in 1e-3..8.0f64, dr in 1e-4..1.0f64, n in 2usize..7) {
        let models = [
            ManifoldModel::hyperbolic(n, 1.0).unwrap(),
            ManifoldModel::hyperbolic(n, 0.25).unwrap(),
            ManifoldModel::warped(n, WarpedProfile::cubic()).unwrap(),
            ManifoldModel::euclidean(n).unwrap(),
        ];
        for m in &models {
            let a = m.density(r).unwrap();
            let b = m.density(r + dr).unwrap();
            prop_assert!(b >= a * (1.0 - 1e-14), "{} {r} {a} {b}", m.name());
            prop_assert!(a >= 1.0 - 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reports_are_p_homogeneous(seed in 0u64..1000, re in -3.0..3.0f64, im in -3.0..3.0f64, p in 1.5..3.5f64) {
        prop_assume!(re.hypot(im) > 0.1);
        let lambda = Complex64::new(re, im);
        let m = ManifoldModel::hyperbolic(4, 1.0).unwrap();
        let f = generate_corpus(&CorpusSpec::new(seed, 1, Region::Annulus { inner: 0.2, outer: 0.9 }).complex())
            .unwrap()
            .remove(0);
        let mut params = ParamSet::defaults(CaseId::SubcritHardy, 4).unwrap();
        params.p = p;
        let q = QuadratureSpec::default();
        let a = evaluate(CaseId::SubcritHardy, &params, &m, &f, &q).unwrap();
        let b = evaluate(CaseId::SubcritHardy, &params, &m, &f.scaled(lambda), &q).unwrap();
        let s = lambda.norm().powf(p);
        prop_assert!((b.lhs - s * a.lhs).abs() <= 1e-9 * s * a.lhs);
        prop_assert!((b.rhs - s * a.rhs).abs() <= 1e-9 * s * a.rhs);
        prop_assert!((b.ratio - a.ratio).abs() <= 1e-9 * a.ratio);
    }

    #[test]
    fn euclidean_ratio_is_dilation_invariant(seed in 0u64..1000, lambda in 0.3..3.0f64, beta in -1.0..0.5f64) {
        let m = ManifoldModel::euclidean(4).unwrap();
        let f = generate_corpus(&CorpusSpec::new(seed, 1, Region::Annulus { inner: 0.2, outer: 0.9 }))
            .unwrap()
            .remove(0);
        let g = dilate(&f, lambda);
        let mut params = ParamSet::defaults(CaseId::SubcritHardy, 4).unwrap();
        params.beta = beta;
        let q = QuadratureSpec::default();
        let a = evaluate(CaseId::SubcritHardy, &params, &m, &f, &q).unwrap();
        let b = evaluate(CaseId::SubcritHardy, &params, &m, &g, &q).unwrap();
        prop_assert!((a.ratio - b.ratio).abs() <= 1e-8 * a.ratio, "{} vs {}", a.ratio, b.ratio);
    }
}
