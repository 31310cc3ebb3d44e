use phtree::analysis::{dimension_large_m_limit, fatou_dimension};
use phtree::boundary::BoundarySpec;
use phtree::dpp::GameParams;
use phtree::solver::{build_un, compare_fields};
use phtree::tree::Vertex;
use phtree::ucp::{compute_rho, IntPattern, SubsetSpec};
use proptest::prelude::*;

fn tabulated(knots: &[f64], values: &[f64]) -> BoundarySpec {
    let mut t: Vec<f64> = knots.iter().copied().filter(|x| *x > 0.0 && *x < 1.0).collect();
    t.push(0.0);
    t.push(1.0);
    t.sort_by(f64::total_cmp);
    t.dedup();
    let pts = t.iter().enumerate().map(|(i, &x)| (x, values[i % values.len()])).collect();
    BoundarySpec::tabulated(pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comparison_principle(
        knots in prop::collection::vec(0.0f64..1.0, 0..6),
        values in prop::collection::vec(-2.0f64..2.0, 8),
        lift in prop::collection::vec(0.0f64..1.0, 8),
        m in 2u32..5,
        alpha in 0.0f64..=1.0,
        n in 1usize..6,
    ) {
        let p = GameParams::from_alpha(m, alpha).unwrap();
        let g_values: Vec<f64> = values.iter().zip(&lift).map(|(v, l)| v + l).collect();
        let f = build_un(&tabulated(&knots, &values), &p, n).unwrap();
        let g = build_un(&tabulated(&knots, &g_values), &p, n).unwrap();
        prop_assert!(compare_fields(&f, &g).unwrap());
    }

    #[test]
    fn maximum_principle_and_zero_residual(
        values in prop::collection::vec(-5.0f64..5.0, 2..10),
        m in 2u32..6,
        alpha in 0.0f64..=1.0,
        n in 1usize..6,
    ) {
        let knots: Vec<f64> = (1..values.len() - 1).map(|i| i as f64 / (values.len() - 1) as f64).collect();
        let p = GameParams::from_alpha(m, alpha).unwrap();
        let field = build_un(&tabulated(&knots, &values), &p, n).unwrap();
        prop_assert_eq!(field.max_principle_violations(), 0);
        prop_assert!(field.check(1e-12).max_abs_residual <= 1e-12);
    }

    #[test]
    fn shifted_reflection_identity(m in 2u32..5, n in 1usize..7) {
        // F(t) = t sampled at left endpoints: reflecting a leaf sends j/m^n
        // to 1 - m^-n - j/m^n, and max + min commutes with u -> c - u
        let p = GameParams::new(m, 1.0, 0.0).unwrap();
        let field = build_un(&BoundarySpec::linear(), &p, n).unwrap();
        let c = 1.0 - (m as f64).powi(-(n as i32));
        for k in 0..=n {
            for (j, &u) in field.levels()[k].iter().enumerate() {
                let r = field.evaluate(&Vertex::from_index(m, k, j as u64).reflect());
                prop_assert!((r + u - c).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rho_round_trip(gaps in prop::collection::vec(1u64..5, 1..6), digit in 0u32..3) {
        let list = gaps.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let pattern: IntPattern = format!("{list};finite").parse().unwrap();
        let spec = SubsetSpec::rho_generated(3, pattern, digit).unwrap();
        let ledger = compute_rho(&spec, gaps.len()).unwrap();
        prop_assert_eq!(&ledger.rho, &gaps);
        prop_assert_eq!(ledger.p1_ok, Some(true));
        prop_assert_ne!(ledger.p2_ok, Some(false));
        prop_assert!(!ledger.quantifier_discrepancy);
    }

    #[test]
    fn theta_delta_identity(m in 2u32..1000, alpha in 0.0f64..=1.0) {
        let p = GameParams::from_alpha(m, alpha).unwrap();
        prop_assert!((p.theta() + p.delta() - 1.0).abs() <= 1e-14);
        prop_assert!((p.delta() - (alpha / 2.0 + (1.0 - alpha) / m as f64)).abs() <= 1e-14);
    }
}

#[test]
fn large_m_gap_decays_like_inverse_log() {
    // dim - (1+β)/2 behaves like c(α) / ln m with
    // c(α) = (1 - α/2) ln(α / (2 - α)) + ln(2 / α)
    for alpha in [0.25f64, 0.5, 0.75, 1.0] {
        let c = (1.0 - alpha / 2.0) * (alpha / (2.0 - alpha)).ln() + (2.0 / alpha).ln();
        let mut prev = f64::INFINITY;
        for m in [1_000u32, 100_000, 10_000_000, 1_000_000_000] {
            let p = GameParams::from_alpha(m, alpha).unwrap();
            let gap = fatou_dimension(&p).dimension - dimension_large_m_limit(1.0 - alpha).unwrap();
            assert!(gap > 0.0 && gap < prev, "alpha {alpha}, m {m}");
            prev = gap;
            let scaled = gap * (m as f64).ln();
            if m == 1_000_000_000 {
                assert!((scaled - c).abs() < 1e-6 * c, "alpha {alpha}: {scaled} vs {c}");
            }
        }
    }
}
