use phtree::dpp::GameParams;
use phtree::error::Error;
use phtree::tree::{ExactPoint, Vertex};
use phtree::ucp::{
    analyze, build_counterexample, compute_rho, criterion_verdict, density_check, pa_check, partial_products,
    unboundedness_probe, IntPattern, SubsetSpec, Verdict,
};

fn half() -> GameParams {
    GameParams::new(3, 0.5, 0.5).unwrap()
}

fn v(s: &str) -> Vertex {
    Vertex::parse(3, s).unwrap()
}

#[test]
fn cantor_set_is_not_dense() {
    let u = SubsetSpec::digit_avoiding(3, 1).unwrap();
    let d = density_check(&u, 1).unwrap();
    assert!(!d.dense_up_to);
    let gap = d.witness_gap.unwrap();
    assert_eq!(gap.left, ExactPoint::new(3, 1u32, 1).unwrap());
    assert_eq!(gap.right(), ExactPoint::new(3, 2u32, 1).unwrap());

    let pa = pa_check(&u, 4).unwrap();
    assert!(!pa.holds);
    assert!(pa.failure_vertex.unwrap().digits().iter().all(|&d| d == 1));

    let r = analyze(&u, &half(), 4).unwrap();
    assert_eq!(r.verdict, Verdict::NoUcpCertified);
}

#[test]
fn last_digit_zero_has_pa_one() {
    let u = SubsetSpec::last_digit(3, 0).unwrap();
    for d in 0..u.depth_bound() {
        assert!(density_check(&u, d).unwrap().dense_up_to, "resolution {d}");
    }
    let pa = pa_check(&u, 3).unwrap();
    assert!(pa.holds);
    assert_eq!(pa.n, Some(1));
    assert_eq!(analyze(&u, &half(), 4).unwrap().verdict, Verdict::UcpCertified);
}

#[test]
fn whole_tree_is_dense() {
    let u = SubsetSpec::predicate(3, 10, |_| true).unwrap();
    for d in [0, 3, 10] {
        assert!(density_check(&u, d).unwrap().dense_up_to);
    }
    assert!(matches!(density_check(&u, 11), Err(Error::InsufficientDepth { .. })));
}

#[test]
fn sparse_full_levels_fail_pa() {
    let u = SubsetSpec::full_levels(3, IntPattern::Finite(vec![2, 4, 8])).unwrap().with_depth_bound(12);
    let pa = pa_check(&u, 1).unwrap();
    assert!(!pa.holds);
    let pa = pa_check(&u, 3).unwrap();
    assert!(!pa.holds, "the gap from 4 to 8 exceeds 3");
}

#[test]
fn full_level_breaks_p1() {
    let u = SubsetSpec::full_levels(3, IntPattern::Finite(vec![2])).unwrap();
    let ledger = compute_rho(&u, 1).unwrap();
    assert_eq!(ledger.rho[0], 2);
    assert_eq!(ledger.p1_ok, Some(false));
    assert_eq!(ledger.p1_members, Some(9));
}

#[test]
fn single_vertex() {
    let u = SubsetSpec::members(3, [v("0")]).unwrap();
    let ledger = compute_rho(&u, 1).unwrap();
    assert_eq!(ledger.rho, vec![1]);
    assert_eq!(ledger.p1_ok, Some(true));
}

#[test]
fn ones_and_doubling_gaps_recovered_and_ucp() {
    let rho: IntPattern = "1,4,1,8,1,16,…".parse().unwrap();
    let u = SubsetSpec::rho_generated(3, rho, 0).unwrap();
    let ledger = compute_rho(&u, 6).unwrap();
    assert_eq!(ledger.rho, vec![1, 4, 1, 8, 1, 16]);
    assert_eq!(ledger.eta, vec![1, 5, 6, 14, 15, 31]);
    assert_eq!(ledger.p1_ok, Some(true));
    assert_eq!(ledger.p2_ok, Some(true));

    assert!(u.contains(&v("0")));
    assert!(!u.contains(&v("1")));
    assert!(u.contains(&v("1.0.0.0.0")));
    assert!(!u.contains(&v("0.0.0.0.0")), "below U the next stage starts over");

    let r = analyze(&u, &half(), 6).unwrap();
    assert_eq!(r.verdict, Verdict::UcpCertified);

    let probe = unboundedness_probe(&u, &half(), 6).unwrap();
    assert!(probe.windows(2).all(|w| w[1] > w[0]));
    // every ρ = 1 stage multiplies the bound by 1/θ
    assert!((probe[2] / probe[1] - 12.0 / 7.0).abs() < 1e-12);
}

#[test]
fn criterion_examples() {
    let p = half();
    let odd_ones: IntPattern = "1,4,1,8,1,16,…".parse().unwrap();
    assert_eq!(criterion_verdict(&odd_ones, &p).unwrap().diverges, Some(true));

    let linear = IntPattern::Arithmetic { first: 1, step: 1 };
    let c = criterion_verdict(&linear, &p).unwrap();
    assert_eq!(c.diverges, Some(false));
    assert!((c.limit_sum.unwrap() - 5.0 / 7.0).abs() < 1e-12);

    let finite = IntPattern::Finite(vec![2, 2, 2]);
    let c = criterion_verdict(&finite, &p).unwrap();
    assert_eq!(c.diverges, None);
    assert!((c.partial_sum - 3.0 * (5.0f64 / 12.0).powi(2)).abs() < 1e-15);

    let degenerate = GameParams::new(2, 0.0, 1.0).unwrap();
    assert!(criterion_verdict(&linear, &degenerate).is_ok());
}

#[test]
fn counterexample_for_linear_gaps() {
    let p = half();
    let rho = IntPattern::Arithmetic { first: 1, step: 1 };
    let field = build_counterexample(&rho, &p, 0, 21).unwrap();
    let check = field.check().unwrap();
    assert!(check.max_abs_residual <= 1e-10);
    assert_eq!(check.nonzero_on_u, 0);
    assert_eq!(field.value(&Vertex::root(3)), Some(1.0));

    let products = partial_products(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], 5.0 / 12.0).unwrap();
    assert!(products.windows(2).all(|w| w[1] > w[0]));
    assert!((products[0] - 12.0 / 7.0).abs() < 1e-15);
    let euler: f64 = (1..200).map(|k| 1.0 / (1.0 - (5.0f64 / 12.0).powi(k))).product();
    assert!((field.sup_bound() - euler).abs() < 1e-12);
    assert!(field.built_sup() <= products[5] + 1e-9, "depth 21 reaches stage 6");

    let single = build_counterexample(&IntPattern::Finite(vec![1]), &p, 0, 3).unwrap();
    assert!((single.stage_maxima()[0] - 12.0 / 7.0).abs() < 1e-15);
    let theta = p.theta();
    let root = theta * single.stage_maxima()[0];
    assert!((root - 1.0).abs() < 1e-15);
    assert_eq!(single.value(&v("0")), Some(0.0));

    let odd_ones: IntPattern = "1,4,1,8,1,16,…".parse().unwrap();
    assert!(matches!(build_counterexample(&odd_ones, &p, 0, 10), Err(Error::Refused(_))));
}
