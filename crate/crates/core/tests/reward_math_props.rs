use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use pspo::reward_math::{
    accumulate_geomean, accumulate_product, scores, weibull_shape, weibull_shape_at, StepScore, WeibullShaping,
};

fn score_list() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 1..30)
}

proptest! {
    #[test]
    fn product_bounded_by_min(v in score_list()) {
        let s = scores(&v).unwrap();
        let p = accumulate_product(&s).unwrap();
        let min = v.iter().copied().fold(1.0, f64::min);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(p <= min + 1e-15);
    }

    #[test]
    fn geomean_dominates_product(v in score_list()) {
        let s = scores(&v).unwrap();
        let g = accumulate_geomean(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
        prop_assert!(g + 1e-12 >= accumulate_product(&s).unwrap());
    }

    #[test]
    fn permutation_invariant(v in score_list(), rot in 0usize..30) {
        let mut w = v.clone();
        let k = rot % w.len();
        w.rotate_left(k);
        w.reverse();
        let (a, b) = (scores(&v).unwrap(), scores(&w).unwrap());
        prop_assert!((accumulate_product(&a).unwrap() - accumulate_product(&b).unwrap()).abs() < 1e-12);
        prop_assert!((accumulate_geomean(&a).unwrap() - accumulate_geomean(&b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_each_score(v in score_list(), idx in 0usize..30, bump in 0.0f64..1.0) {
        let i = idx % v.len();
        let mut w = v.clone();
        w[i] = (w[i] + bump).min(1.0);
        let (a, b) = (scores(&v).unwrap(), scores(&w).unwrap());
        prop_assert!(accumulate_product(&b).unwrap() + 1e-15 >= accumulate_product(&a).unwrap());
        prop_assert!(accumulate_geomean(&b).unwrap() + 1e-12 >= accumulate_geomean(&a).unwrap());
    }

    #[test]
    fn appending_sub_unit_score_shrinks_product(v in prop::collection::vec(0.01f64..=1.0, 1..30), p in 0.0f64..0.999) {
        let before = accumulate_product(&scores(&v).unwrap()).unwrap();
        let mut w = v.clone();
        w.push(p);
        prop_assert!(accumulate_product(&scores(&w).unwrap()).unwrap() < before);
    }

    #[test]
    fn appending_geomean_keeps_geomean(v in prop::collection::vec(0.01f64..=1.0, 1..30)) {
        let s = scores(&v).unwrap();
        let g = accumulate_geomean(&s).unwrap();
        let mut w = s.clone();
        w.push(StepScore::new(g).unwrap());
        prop_assert!((accumulate_geomean(&w).unwrap() - g).abs() < 1e-12);
    }

    #[test]
    fn weibull_unimodal(c in 0.1f64..20.0, k in 1.05f64..5.0, lambda in 0.5f64..20.0) {
        let p = WeibullShaping::new(c, k, lambda).unwrap();
        let peak = p.peak_location();
        let grid = |a: f64, b: f64| (0..=200).map(move |i| a + (b - a) * i as f64 / 200.0);
        let rising: Vec<f64> = grid(0.0, peak * 0.999).map(|t| weibull_shape_at(&p, t)).collect();
        let falling: Vec<f64> = grid(peak * 1.001, peak * 2.5).map(|t| weibull_shape_at(&p, t)).collect();
        prop_assert!(rising.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(falling.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(weibull_shape_at(&p, peak) >= rising[200] && weibull_shape_at(&p, peak) >= falling[0]);
        prop_assert_eq!(weibull_shape(&p, 0), 0.0);
    }
}

#[test]
fn paper_integer_argmax_is_four() {
    let p = WeibullShaping::paper();
    let values: Vec<f64> = (0..=50).map(|t| weibull_shape(&p, t)).collect();
    let best = (0..values.len()).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    assert_eq!(best, 4);
    assert_abs_diff_eq!(values[4], 0.9997, epsilon = 1e-3);
}

#[test]
fn iid_product_decays_while_geomean_stays_flat() {
    for p in [0.5, 0.8, 0.95, 0.999] {
        let mut last = f64::INFINITY;
        for t in 1..=20 {
            let chain = vec![StepScore::new(p).unwrap(); t];
            let prod = accumulate_product(&chain).unwrap();
            assert_abs_diff_eq!(prod, p.powi(t as i32), epsilon = 1e-12);
            assert!(prod < last);
            last = prod;
            assert_abs_diff_eq!(accumulate_geomean(&chain).unwrap(), p, epsilon = 1e-12);
        }
    }
}
