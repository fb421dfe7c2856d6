use std::collections::BTreeSet;

use k3pic::lattice::{
    detect_hyperbolic_plane, enumerate_classes, lambda10, lambda6a, lambda6b, lift_contradiction, overlattice_candidates,
    GramLattice, LiftVerdict,
};
use num_rational::Ratio;
use proptest::prelude::*;

fn lattice() -> impl Strategy<Value = GramLattice> {
    (-12i64..=12, -12i64..=12, -12i64..=12)
        .prop_map(|(a, b, c)| GramLattice::new([[a, b], [b, c]], ["e1", "e2"]).unwrap())
}

fn mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

/// Products of elementary matrices and sign changes.
fn unimodular() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::collection::vec((0u8..3, -3i64..=3), 0..6).prop_map(|steps| {
        steps.into_iter().fold([[1, 0], [0, 1]], |acc, (kind, k)| {
            let e = match kind {
                0 => [[1, k], [0, 1]],
                1 => [[1, 0], [k, 1]],
                _ => [[0, 1], [1, 0]],
            };
            mul(acc, e)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn invariants_survive_change_of_basis(l in lattice(), u in unimodular()) {
        let t = l.transform(u);
        prop_assert_eq!(t.discriminant(), l.discriminant());
        prop_assert_eq!(t.is_even(), l.is_even());
        prop_assert_eq!(detect_hyperbolic_plane(&t), detect_hyperbolic_plane(&l));
    }

    #[test]
    fn sublattices_are_compatible_lifts(l in lattice(), m in prop::array::uniform4(-4i64..=4)) {
        let u = [[m[0], m[1]], [m[2], m[3]]];
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det != 0 && l.discriminant() != 0);
        let sub = l.transform(u);
        prop_assert_eq!(sub.discriminant(), det * det * l.discriminant());
        prop_assert_eq!(lift_contradiction(&l, &sub), LiftVerdict::Possible { disc_a: l.discriminant(), disc_b: sub.discriminant(), index: det.abs() });
    }

    #[test]
    fn exact_solutions_contain_the_sweep(l in lattice(), self_int in -10i64..=10, v in (-3i64..=3, -3i64..=3), value in -10i64..=10) {
        let s = enumerate_classes(&l, self_int, v, value, 25).unwrap();
        let brute: Vec<(i64, i64)> = (-25..=25i64)
            .flat_map(|m| (-25..=25i64).map(move |n| (m, n)))
            .filter(|&u| l.square(u) == self_int && l.pairing(v, u) == value)
            .collect();
        prop_assert_eq!(&s.within_bound, &brute);
        if let Some(exact) = &s.exact {
            for u in &brute {
                prop_assert!(exact.contains(u));
            }
            for &u in exact {
                prop_assert_eq!(l.square(u), self_int);
                prop_assert_eq!(l.pairing(v, u), value);
            }
        }
    }
}

/// Classes of v in (Z/p)^2 \ {0}, up to scaling, for which L + Z v/p is even
/// and integral, checked directly with rational arithmetic.
fn brute_survivors(l: &GramLattice, p: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for m in 0..p {
        for n in 0..p {
            if (m, n) == (0, 0) {
                continue;
            }
            let integral = [(1, 0), (0, 1)].iter().all(|&e| Ratio::new(l.pairing((m, n), e), p).is_integer());
            let sq = Ratio::new(l.square((m, n)), p * p);
            if integral && sq.is_integer() && sq.to_integer() % 2 == 0 {
                // normalize so that the first nonzero coordinate is 1
                let lead = if m != 0 { m } else { n };
                let inv = (1..p).find(|k| (k * lead) % p == 1).unwrap();
                out.insert(((m * inv) % p, (n * inv) % p));
            }
        }
    }
    out
}

#[test]
fn overlattice_survivors_match_brute_force() {
    for (l, p) in [(lambda10(), 5), (lambda6a(), 2), (lambda6b(), 3)] {
        let cands = overlattice_candidates(&l, p).unwrap();
        assert_eq!(cands.len() as i64, p + 1);
        let got: BTreeSet<(i64, i64)> = cands.iter().filter(|c| c.survives()).map(|c| c.representative).collect();
        assert_eq!(got, brute_survivors(&l, p), "{l} at p = {p}");
        for c in &cands {
            assert_eq!(c.survives(), c.exclusion.is_none());
            if let Some(o) = &c.overlattice {
                assert!(o.is_even());
                assert_eq!(o.discriminant() * p * p, l.discriminant());
            }
        }
    }
}

#[test]
fn frozen_overlattice_survivors() {
    let reps = |l: &GramLattice, p| -> Vec<(i64, i64)> {
        overlattice_candidates(l, p).unwrap().iter().filter(|c| c.survives()).map(|c| c.representative).collect()
    };
    assert_eq!(reps(&lambda10(), 5), vec![(0, 1), (1, 4)]);
    assert_eq!(reps(&lambda6a(), 2), vec![(0, 1)]);
    assert_eq!(reps(&lambda6b(), 3), vec![(0, 1), (1, 2)]);
    for c in overlattice_candidates(&lambda6b(), 3).unwrap().iter().filter(|c| c.survives()) {
        assert!(detect_hyperbolic_plane(c.overlattice.as_ref().unwrap()));
    }
}

#[test]
fn degree_six_lattices_cannot_share_a_lift() {
    let verdict = lift_contradiction(&lambda6a(), &lambda6b());
    assert!(verdict.is_contradiction(), "{verdict:?}");
    assert_eq!((lambda6a().discriminant(), lambda6b().discriminant()), (-16, -9));
}
