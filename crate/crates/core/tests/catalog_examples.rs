use approx::assert_relative_eq;
use hardy_core::catalog::{chain_evaluate, ckn_gamma, evaluate, identity_residual, CaseId, ParamSet};
use hardy_core::manifold::{sphere_area, ManifoldModel, Region};
use hardy_core::prober::{generate_corpus, CorpusSpec};
use hardy_core::quadrature::QuadratureSpec;
use hardy_core::radial::RadialFunction;
use hardy_core::Error;

fn corpus(seed: u64, n: usize, complex: bool) -> Vec<RadialFunction> {
    let mut s = CorpusSpec::new(seed, n, Region::Annulus { inner: 0.2, outer: 0.9 });
    if complex {
        s = s.complex();
    }
    generate_corpus(&s).unwrap()
}

#[test]
fn double_weight_ratio_exceeds_the_sharp_constant() {
    let m = ManifoldModel::euclidean(5).unwrap();
    let mut s = ParamSet::base(5);
    s.c = 3.0;
    for f in corpus(1, 8, true) {
        let r = evaluate(CaseId::DoubleWeight, &s, &m, &f, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.constant, 2.25, max_relative = 1e-14);
        assert!(r.ratio >= 2.25 - r.slack / r.lhs, "{}", r.ratio);
        assert!(r.pass);
    }
}

#[test]
fn identity_residuals_on_euclidean_and_hyperbolic() {
    let q = QuadratureSpec::default();
    let support = Region::Annulus { inner: 0.25, outer: 2.5 };
    let fs = generate_corpus(&CorpusSpec::new(5, 6, support).complex()).unwrap();
    let e = ManifoldModel::euclidean(3).unwrap();
    let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
    let mut p3 = ParamSet::base(3);
    p3.p = 2.0;
    for f in &fs {
        assert!(identity_residual(&p3, &e, f, &q).unwrap() <= 1e-7);
        assert!(identity_residual(&p3, &h, f, &q).unwrap() <= 1e-6);
    }
    let mut p1 = ParamSet::base(3);
    p1.p = 1.0;
    assert!(matches!(identity_residual(&p1, &e, &fs[0], &q), Err(Error::Hypothesis { .. })));
}

/// For p = 2 the identity reads `∫|f|²/r^N = 4∫ln²r r^{2−N}|f′|² − ∫|ζ − η|²`,
/// checked here with a plain trapezoid rule in `u = ln r`.
#[test]
fn identity_p2_against_trapezoid_oracle() {
    let m = ManifoldModel::euclidean(3).unwrap();
    let support = Region::Annulus { inner: 0.25, outer: 2.5 };
    let f = generate_corpus(&CorpusSpec::new(9, 1, support).complex()).unwrap().remove(0);
    let n = 3.0;
    let (a, b) = (0.25f64.ln(), 2.5f64.ln());
    let steps = 200_000;
    let h = (b - a) / steps as f64;
    let (mut lhs, mut t1, mut t3) = (0.0, 0.0, 0.0);
    for i in 0..=steps {
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        let u = a + h * i as f64;
        let r = u.exp();
        let v = f.value(r);
        let d = f.derivative(r, 1).unwrap();
        // dv = |S²| r^{N−1} dr = |S²| r^N du
        let vol = r.powf(n);
        lhs += w * v.norm_sqr() / r.powf(n) * vol;
        t1 += w * 4.0 * u * u * r.powf(2.0 - n) * d.norm_sqr() * vol;
        let zeta = v * r.powf(-n / 2.0);
        let eta = d * (-2.0 * u * r.powf(-(n - 2.0) / 2.0));
        t3 += w * (zeta - eta).norm_sqr() * vol;
    }
    let area = sphere_area(3).unwrap();
    let (lhs, rhs) = (area * h * lhs, area * h * (t1 - t3));
    assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
    let r = evaluate(CaseId::CritIdentity, &ParamSet::base(3), &m, &f, &QuadratureSpec::default()).unwrap();
    assert_relative_eq!(r.lhs, lhs, max_relative = 1e-8);
    assert!(r.residual.unwrap() <= 1e-7);
}

#[test]
fn chain_first_links() {
    let q = QuadratureSpec::default();
    let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
    let ext = generate_corpus(&CorpusSpec::new(3, 5, Region::Annulus { inner: 1.2, outer: 5.0 })).unwrap();
    let s = ParamSet::defaults(CaseId::ExteriorChain, 3).unwrap();
    for f in &ext {
        let links = chain_evaluate(CaseId::ExteriorChain, &s, &h, f, &q).unwrap();
        assert!(links[0].rhs >= links[0].lhs);
    }
    let e = ManifoldModel::euclidean(4).unwrap();
    let s = ParamSet::defaults(CaseId::DwClassicalChain, 4).unwrap();
    for f in corpus(4, 5, false) {
        let links = chain_evaluate(CaseId::DwClassicalChain, &s, &e, &f, &q).unwrap();
        assert!(links[0].rhs >= links[0].lhs && links[0].pass);
        assert!(links[1].pass);
        assert!(chain_evaluate(CaseId::DoubleWeight, &s, &e, &f, &q).is_err());
    }
}

#[test]
fn rellich_link_matches_even_order_two() {
    let m = ManifoldModel::euclidean(6).unwrap();
    let q = QuadratureSpec::default();
    let mut r = ParamSet::base(6);
    r.beta = 0.0;
    let mut k2 = r.clone();
    k2.k = 2;
    k2.c = (6.0 - 4.0) / 1.0;
    for f in corpus(6, 4, false) {
        let links = chain_evaluate(CaseId::RellichChain, &r, &m, &f, &q).unwrap();
        let h = evaluate(CaseId::HigherEven, &k2, &m, &f, &q).unwrap();
        assert_relative_eq!(links[0].constant, 1.0);
        assert_relative_eq!(1.0 / links[1].constant, 1.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(h.constant, links[1].constant, max_relative = 1e-14);
        assert_relative_eq!(h.lhs, links[1].lhs, max_relative = 1e-12);
        assert_relative_eq!(h.rhs, links[1].rhs, max_relative = 1e-12);
    }
}

#[test]
fn ckn_half_against_grid_oracle() {
    let m = ManifoldModel::euclidean(5).unwrap();
    let mut s = ParamSet::base(5);
    s.c = 3.0;
    s.delta_interp = 0.5;
    s.gamma = ckn_gamma(&s);
    let f = corpus(12, 1, false).remove(0);
    let r = evaluate(CaseId::Ckn, &s, &m, &f, &QuadratureSpec::default()).unwrap();
    // Simpson on a fixed grid: w = r^{a/4}(1−r³)^{b/4} for α = −1, p = 2
    let w = |x: f64| x.powf(0.5) * (1.0 - x.powi(3)).powf(0.5);
    let n = 20_000;
    let (lo, hi) = (0.2, 0.9);
    let h = (hi - lo) / n as f64;
    let (mut i1, mut i2, mut i3) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let x = lo + h * i as f64;
        let c = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let vol = x.powi(4);
        let v = f.value(x).norm();
        let d = f.derivative(x, 1).unwrap().norm();
        i1 += c * (v * w(x).powf(s.gamma)).powi(2) * vol;
        // a = b = p leaves the gradient term unweighted
        i2 += c * d * d * vol;
        i3 += c * (v * w(x).powf(s.beta)).powi(2) * vol;
    }
    let area = sphere_area(5).unwrap();
    let norm = |v: f64| (area * h / 3.0 * v).sqrt();
    let k = (2.0f64 / 3.0).sqrt();
    assert_relative_eq!(r.lhs, norm(i1), max_relative = 1e-9);
    assert_relative_eq!(r.rhs, k * norm(i2).sqrt() * norm(i3).sqrt(), max_relative = 1e-9);
    assert!(r.lhs <= r.rhs);
}

#[test]
fn ratio_is_invariant_under_complex_scaling() {
    let m = ManifoldModel::hyperbolic(3, 1.0).unwrap();
    let q = QuadratureSpec::default();
    let lambda = num_complex::Complex64::new(-0.7, 2.3);
    for id in [CaseId::SubcritHardy, CaseId::DoubleWeight, CaseId::CritBallHardy, CaseId::RellFirst] {
        let s = ParamSet::defaults(id, 3).unwrap();
        for f in corpus(20, 3, true) {
            let a = evaluate(id, &s, &m, &f, &q).unwrap();
            let b = evaluate(id, &s, &m, &f.scaled(lambda), &q).unwrap();
            assert_relative_eq!(a.ratio, b.ratio, max_relative = 1e-10);
        }
    }
}

#[test]
fn every_default_case_passes_on_a_small_corpus() {
    let q = QuadratureSpec::default();
    for n in [3, 4, 5] {
        let m = ManifoldModel::euclidean(n).unwrap();
        for id in CaseId::ALL {
            let Some(s) = ParamSet::defaults(id, n) else { continue };
            let fs = generate_corpus(&CorpusSpec::new(40, 2, id.default_support()).complex()).unwrap();
            for f in &fs {
                let r = evaluate(id, &s, &m, f, &q).unwrap_or_else(|e| panic!("{id} N={n}: {e}"));
                assert!(r.pass, "{id} N={n} {}: {r:?}", f.label());
            }
        }
    }
}
