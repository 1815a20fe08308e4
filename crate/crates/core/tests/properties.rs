mod common;

use involution_lattice::branch::{BranchCandidate, Component};
use involution_lattice::surface::{genus_additivity, mj_invariants, rh_min_genus, RamificationProfile, SurfaceInvariants};
use num_rational::BigRational;
use proptest::prelude::*;

#[test]
fn pair_is_symmetric_and_bilinear() {
    common::bilinearity(1000).unwrap();
}

#[test]
fn det_matches_permutation_expansion() {
    common::det_oracle(200).unwrap();
}

#[test]
fn index_bound_sound_on_hyperbolic_forms() {
    common::hodge_sound(200).unwrap();
}

#[test]
fn roots_substitute_to_zero() {
    common::roots_back_substitute(500).unwrap();
}

#[test]
fn basis_solution_reproduces_pairings() {
    common::basis_residual(300).unwrap();
}

fn invariants() -> impl Strategy<Value = SurfaceInvariants> {
    (-6i64..=4, 0i64..=10, -4i64..=4).prop_map(|(kk, kb, bb)| SurfaceInvariants::from_branch(1, kk, kb, bb, 1, 10 - kk))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(256) })]

    #[test]
    fn mj_rows_telescope(inv in invariants(), j in -6i64..=6) {
        let (a0, b0, c0) = mj_invariants(j, &inv);
        let (a1, b1, c1) = mj_invariants(j + 1, &inv);
        let (a2, b2, c2) = mj_invariants(j + 2, &inv);
        prop_assert_eq!(a1 - a0, inv.kk);
        prop_assert_eq!(b1 - b0, inv.kd);
        prop_assert_eq!(a2 - a1, a1 - a0);
        prop_assert_eq!(b2 - b1, b1 - b0);
        prop_assert_eq!(c2 - 2 * c1 + c0, 2 * inv.kk);
        prop_assert_eq!(c1 - c0, (2 * j + 1) * inv.kk + 2 * inv.kd);
    }

    #[test]
    fn rh_bound_monotone(d in 1i64..=8, base in prop::collection::vec(0i64..=12, 0..6), extra in 0i64..=12, half in any::<bool>()) {
        let c = |n: i64| if half { BigRational::new(n.into(), 2.into()) } else { BigRational::from_integer(n.into()) };
        let small: Vec<BigRational> = base.iter().map(|&n| c(n)).collect();
        let mut big = small.clone();
        big.push(c(extra));
        let g0 = rh_min_genus(&RamificationProfile::new(d, small.clone()).unwrap());
        let g1 = rh_min_genus(&RamificationProfile::new(d, big).unwrap());
        prop_assert!(g1 >= g0);
        let g2 = rh_min_genus(&RamificationProfile::new(d + 1, small).unwrap());
        prop_assert!(g2 <= g0);
        prop_assert!(g0 >= 0);
    }

    #[test]
    fn genus_additive(a in prop::collection::vec(0i64..=6, 1..5), b in prop::collection::vec(0i64..=6, 1..5)) {
        let mut ab = a.clone();
        ab.extend(&b);
        prop_assert_eq!(genus_additivity(&ab).unwrap(), genus_additivity(&a).unwrap() + genus_additivity(&b).unwrap() - 1);
    }

    #[test]
    fn candidate_order_is_canonical(pairs in prop::collection::vec((0i64..=5, -6i64..=6), 1..5), rot in 0usize..5) {
        let c = BranchCandidate::from_pairs(&pairs);
        let mut shuffled = pairs.clone();
        let r = rot % shuffled.len();
        shuffled.rotate_left(r);
        shuffled.reverse();
        prop_assert_eq!(&BranchCandidate::from_pairs(&shuffled), &c);
        let back: BranchCandidate = c.to_string().parse().unwrap();
        prop_assert_eq!(&back, &c);
        let comps = c.components();
        for w in comps.windows(2) {
            prop_assert!((w[0].g, w[0].ss) >= (w[1].g, w[1].ss));
        }
        let kappa: i64 = comps.iter().map(Component::kappa).sum();
        prop_assert_eq!(kappa, c.kappa_sum());
    }
}
