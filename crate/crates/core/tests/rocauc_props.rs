use llr_lab::quadrature::{integrate, QuadTolerance};
use llr_lab::rocauc::{
    auc_probability_identity_check, binormal_auc, binormal_roc, binormal_tpf, empirical_auc,
    empirical_error_fractions, empirical_roc, fit_line, normal_deviate_fit, trapezoid_auc, ScoreSet,
};
use llr_lab::smallmat::{std_normal_cdf, std_normal_pdf};
use proptest::prelude::*;

/// Scores on a coarse lattice so that ties are common.
fn score_set() -> impl Strategy<Value = ScoreSet> {
    let class = |n| prop::collection::vec((-20i32..20).prop_map(|k| k as f64 * 0.25), 1..n);
    (class(60), class(60)).prop_map(|(a, b)| ScoreSet::new(a, b).unwrap())
}

fn brute_auc(s: &ScoreSet) -> f64 {
    let mut total = 0.0;
    for &a in s.class1() {
        for &b in s.class2() {
            total += if a > b {
                1.0
            } else if a == b {
                0.5
            } else {
                0.0
            };
        }
    }
    total / (s.class1().len() * s.class2().len()) as f64
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn auc_matches_pair_count(s in score_set()) {
        let auc = empirical_auc(&s).unwrap();
        prop_assert!((auc - brute_auc(&s)).abs() < 1e-12);
        let (mw, prob) = auc_probability_identity_check(&s).unwrap();
        prop_assert!((mw - prob).abs() < 1e-12);
        prop_assert!((trapezoid_auc(&empirical_roc(&s).unwrap()).unwrap() - auc).abs() < 1e-12);
    }

    #[test]
    fn label_swap_complements(s in score_set()) {
        let a = empirical_auc(&s).unwrap();
        let b = empirical_auc(&s.swapped()).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12, "{} + {}", a, b);
    }

    #[test]
    fn raising_class_one_never_hurts(s in score_set(), idx in 0usize..60, bump in 0.0f64..3.0) {
        let mut c1 = s.class1().to_vec();
        let i = idx % c1.len();
        c1[i] += bump;
        let raised = ScoreSet::new(c1, s.class2().to_vec()).unwrap();
        prop_assert!(empirical_auc(&raised).unwrap() >= empirical_auc(&s).unwrap());
    }

    #[test]
    fn roc_curve_shape(s in score_set()) {
        let roc = empirical_roc(&s).unwrap();
        let pts = roc.points();
        prop_assert_eq!((pts[0].fpf, pts[0].tpf), (0.0, 0.0));
        let last = pts[pts.len() - 1];
        prop_assert_eq!((last.fpf, last.tpf), (1.0, 1.0));
        for w in pts.windows(2) {
            prop_assert!(w[1].fpf >= w[0].fpf && w[1].tpf >= w[0].tpf);
            prop_assert!(w[1].threshold < w[0].threshold);
        }
        // one interior point per distinct score
        let mut all: Vec<f64> = s.class1().iter().chain(s.class2()).copied().collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        prop_assert_eq!(pts.len(), all.len() + 2);
    }

    #[test]
    fn error_fractions_in_range(s in score_set(), th in -6.0f64..6.0) {
        let e = empirical_error_fractions(&s, th).unwrap();
        prop_assert!((0.0..=1.0).contains(&e.fnf) && (0.0..=1.0).contains(&e.fpf));
        prop_assert!((e.tpf() + e.fnf - 1.0).abs() < 1e-15);
    }
}

#[test]
fn auc_fixed_examples() {
    let s = ScoreSet::new(vec![3.0, 4.0], vec![1.0, 2.0]).unwrap();
    assert_eq!(empirical_auc(&s).unwrap(), 1.0);
    let tie = ScoreSet::new(vec![1.0], vec![1.0]).unwrap();
    assert_eq!(empirical_auc(&tie).unwrap(), 0.5);
    let empty = ScoreSet::new(vec![], vec![1.0]).unwrap();
    assert!(empirical_auc(&empty).is_err());
    assert!(empirical_roc(&empty).is_err());
    assert!(empirical_error_fractions(&empty, 0.0).is_err());
    let e = empirical_error_fractions(&s, 2.0).unwrap();
    assert_eq!((e.fnf, e.fpf), (0.0, 0.0));
}

/// TPF(FPF) computed from the defining integrals: with class two N(0,1) and
/// class one N(a/b, 1/b²), find the threshold t by bisection on the class-two
/// tail integral, then integrate the class-one density above t.
fn tpf_oracle(a: f64, b: f64, fpf: f64) -> f64 {
    let tol = QuadTolerance {
        abs: 1e-15,
        rel: 1e-13,
        max_evals: 1 << 15,
    };
    let tail2 = |t: f64| integrate(std_normal_pdf, t, t + 40.0, tol).value;
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tail2(mid) > fpf {
            lo = mid
        } else {
            hi = mid
        }
    }
    let t = 0.5 * (lo + hi);
    let (m, sd) = (a / b, 1.0 / b);
    integrate(|x| std_normal_pdf((x - m) / sd) / sd, t, m + 40.0 * sd, tol).value
}

#[test]
fn binormal_tpf_matches_integral_oracle() {
    for fpf in [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
        let got = binormal_tpf(1.2, 0.8, fpf).unwrap();
        let want = tpf_oracle(1.2, 0.8, fpf);
        assert!((got - want).abs() < 1e-8, "fpf {fpf}: {got} vs {want}");
    }
    assert!(binormal_tpf(1.0, 1.0, 0.0).is_err());
    assert!(binormal_tpf(1.0, 1.0, 1.0).is_err());
}

#[test]
fn binormal_auc_matches_trapezoid() {
    for (a, b) in [(0.8955, 1.0), (1.2, 0.8), (0.5, 1.7)] {
        let roc = binormal_roc(a, b, 100_000).unwrap();
        let trap = trapezoid_auc(&roc).unwrap();
        assert!((trap - binormal_auc(a, b).unwrap()).abs() < 1e-4, "{a} {b}");
    }
    assert!((binormal_auc(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    assert!((binormal_auc(0.8955, 1.0).unwrap() - std_normal_cdf(0.8955 / 2f64.sqrt())).abs() < 1e-15);
    assert!(binormal_auc(1.0, 0.0).is_err());
}

#[test]
fn deviate_fit_recovers_known_line() {
    let fit = normal_deviate_fit(&binormal_roc(1.2, 0.8, 999).unwrap()).unwrap();
    assert!((fit.a - 1.2).abs() < 1e-6 && (fit.b - 0.8).abs() < 1e-6);
    assert!(fit.residual < 1e-9, "{fit:?}");
}

// Kept to |a + b·z| ≤ 5 over the sampled points: beyond that Φ⁻¹ of a TPF
// near 1 cannot be recovered to 1e-9 from a double.
proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn deviate_fit_round_trips(a in -1.5f64..1.5, b in 0.3f64..1.3) {
        let fit = normal_deviate_fit(&binormal_roc(a, b, 199).unwrap()).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-6 && (fit.b - b).abs() < 1e-6, "{:?}", fit);
        prop_assert!(fit.residual < 1e-9);
        prop_assert_eq!(fit.n_points, 199);
    }
}

#[test]
fn fit_line_needs_three_points() {
    assert!(fit_line(&[(0.0, 0.0), (1.0, 1.0)]).is_err());
    assert!(fit_line(&[(1.0, 0.0), (1.0, 1.0), (1.0, 2.0)]).is_err());
    let f = fit_line(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
    assert!((f.a - 1.0).abs() < 1e-15 && (f.b - 2.0).abs() < 1e-15);
}
