//! Randomized checks of invariants that span several modules.

use std::f64::consts::{E, PI};

use cg_uncert::bounds::{
    bound_B, bound_R, check_coarse_relations, check_coarse_relations_with, GhfPair, RelationId,
};
use cg_uncert::coarse::{bin_density, decompose_stats, GhfFamily, GhfSpec};
use cg_uncert::specfun::prolate_r00;
use cg_uncert::states::{momentum_density, position_density, StateModel};
use proptest::prelude::*;

fn catalog() -> Vec<(String, StateModel)> {
    StateModel::catalog(1.0).unwrap()
}

fn ghf_family() -> impl Strategy<Value = GhfFamily> {
    prop_oneof![
        Just(GhfFamily::Rectangle),
        (-50.0f64..50.0).prop_map(|a| GhfFamily::TruncatedGaussian { a }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstructed_density_obeys_reversed_log_sobolev(
        idx in 0usize..7,
        momentum in any::<bool>(),
        log_eta in -1.0f64..1.0,
        frac in 0.0f64..1.0,
        family in ghf_family(),
    ) {
        let (_, s) = &catalog()[idx];
        let d = if momentum { momentum_density(s) } else { position_density(s) };
        let eta = 10f64.powf(log_eta);
        let b = bin_density(&d, eta, frac * eta).unwrap();
        let g = GhfSpec::new(family, eta).unwrap();
        let (var, ent) = decompose_stats(&b, &g).unwrap();
        prop_assert!(0.5 * (2.0 * PI * E * var).ln() >= ent - 1e-9);
    }

    #[test]
    fn coarse_relations_hold_for_random_widths(
        idx in 0usize..7,
        log_dx in -1.5f64..1.5,
        log_dp in -1.5f64..1.5,
        fx in 0.0f64..1.0,
        fp in 0.0f64..1.0,
        alpha in 0.5f64..=1.0,
        gx in ghf_family(),
        gp in ghf_family(),
    ) {
        let (name, s) = &catalog()[idx];
        let (dx, dp) = (10f64.powf(log_dx), 10f64.powf(log_dp));
        let ghfs = GhfPair { x: gx, p: gp };
        let reports = check_coarse_relations_with(s, dx, dp, alpha, (fx * dx, fp * dp), ghfs).unwrap();
        for r in &reports {
            prop_assert!(r.holds(), "{name}: {r:?}");
        }
    }

    #[test]
    fn lambda_increases_with_bandwidth(c in 0.01f64..20.0, step in 0.01f64..2.0) {
        let a = prolate_r00(c).unwrap().lambda0;
        let b = prolate_r00(c + step).unwrap().lambda0;
        prop_assert!(0.0 < a && a < b && b <= 1.0);
    }
}

#[test]
fn r_minus_b_one_changes_sign_once() {
    let xs: Vec<f64> = (0..300)
        .map(|i| 10f64.powf(-1.0 + 3.0 * i as f64 / 299.0))
        .collect();
    let signs: Vec<bool> = xs
        .iter()
        .map(|&x| bound_R(x, 1.0, 1.0).unwrap() > bound_B(x, 1.0, 1.0, 1.0).unwrap())
        .collect();
    assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);
}

#[test]
fn optimal_margin_shrinks_under_refinement() {
    let s = StateModel::gaussian(1.0, 1.0).unwrap();
    let margins: Vec<f64> = [0.3, 0.1, 0.03, 0.01, 0.003, 0.001]
        .iter()
        .map(|&eta| {
            let reports = check_coarse_relations(&s, eta, eta, 1.0, (0.0, 0.0)).unwrap();
            reports
                .iter()
                .find(|r| r.relation_id == RelationId::HeisOptimal)
                .unwrap()
                .margin
        })
        .collect();
    assert!(margins.iter().all(|m| *m >= 0.0));
    assert!(margins.windows(2).all(|w| w[1] < w[0]), "{margins:?}");
}
