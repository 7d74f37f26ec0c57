mod common;

use std::collections::BTreeSet;

use circlechar::bohr::{constraint_set, enumerate_bohr, exact_norm, BohrParams};
use circlechar::circle::{norm, Membership};
use circlechar::constants::sqrt2;
use circlechar::density::thin;
use circlechar::filters::FilterBasis;
use circlechar::homomorphism::{interleave, HomTarget};
use circlechar::padic::{build_sequence, circle_convergence_set, PadicSpec};
use circlechar::{ArcSet, CharSequence, CircleElement, Provenance};
use common::{bohr_scan, norm_q, q, Gen, Q};
use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use proptest::prelude::*;

fn sigma_strategy(max_den: i64) -> impl Strategy<Value = Q> {
    (2..=max_den).prop_flat_map(|d| (1..d).prop_map(move |n| q(n, d)))
}

fn arc_strategy() -> impl Strategy<Value = ArcSet> {
    prop::collection::vec((0i64..24, 0i64..12), 0..4).prop_map(|v| {
        ArcSet::from_arcs(v.into_iter().map(|(s, l)| (q(s, 24), q(s + l, 24))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn constraint_arc_has_measure_two_sigma(k in prop_oneof![-50i64..=-1, 1i64..=50], sigma in sigma_strategy(40)) {
        prop_assume!(sigma < q(1, 2));
        let a = ArcSet::from_constraint(k, &sigma).unwrap();
        prop_assert_eq!(a.measure(), &sigma * Q::from_integer(2.into()));
    }

    #[test]
    fn norm_is_even(a in 0i64..1000, b in 1i64..1000, k in -10_000i64..10_000) {
        let alpha = q(a, b);
        prop_assert_eq!(exact_norm(&alpha, k), exact_norm(&alpha, -k));
        prop_assert_eq!(exact_norm(&alpha, k), norm_q(&(&alpha * Q::from_integer(k.into()))));
        let s = CircleElement::symbol(&sqrt2());
        let (p, m) = (norm(&s, k, 128).unwrap(), norm(&s, -k, 128).unwrap());
        prop_assert!(p.lo <= m.hi && m.lo <= p.hi);
    }

    #[test]
    fn norm_triangle(a in 0i64..1000, b in 1i64..1000, k in -5000i64..5000, m in -5000i64..5000) {
        let alpha = q(a, b);
        prop_assert!(exact_norm(&alpha, k + m) <= exact_norm(&alpha, k) + exact_norm(&alpha, m));
    }

    /// Small multiples of τ all within σ < 1/3 force ‖τ‖ ≤ σ/n.
    #[test]
    fn bounded_multiples_contract(a in 0i64..500, b in 1i64..500, n in 1i64..12, sigma in sigma_strategy(30)) {
        prop_assume!(sigma < q(1, 3));
        let tau = q(a, b);
        let all_small = (1..=n).all(|i| norm_q(&(&tau * Q::from_integer(i.into()))) <= sigma);
        if all_small {
            prop_assert!(exact_norm(&tau, 1) <= &sigma / Q::from_integer(n.into()));
        }
    }

    #[test]
    fn arc_intersection_laws(a in arc_strategy(), b in arc_strategy(), c in arc_strategy()) {
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
        prop_assert_eq!(a.intersect(&a), a.clone());
    }

    #[test]
    fn constraint_set_of_union_is_intersection(
        e1 in prop::collection::btree_set(1i64..40, 1..4),
        e2 in prop::collection::btree_set(1i64..40, 1..4),
        sigma in sigma_strategy(20),
    ) {
        prop_assume!(sigma < q(1, 3));
        let u: BTreeSet<i64> = e1.union(&e2).copied().collect();
        let lhs = constraint_set(&u, &sigma).unwrap();
        let rhs = constraint_set(&e1, &sigma).unwrap().intersect(&constraint_set(&e2, &sigma).unwrap());
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_ne!(lhs.member(&CircleElement::zero(), 64).unwrap(), Membership::Out);
    }

    #[test]
    fn constraint_set_matches_pointwise_norms(
        e in prop::collection::btree_set(1i64..30, 1..4),
        sigma in sigma_strategy(20),
        (x, d) in (1i64..200).prop_flat_map(|d| (0..d, Just(d))),
    ) {
        prop_assume!(sigma < q(1, 3));
        let set = constraint_set(&e, &sigma).unwrap();
        let beta = q(x, d);
        let inside = e.iter().all(|&k| norm_q(&(&beta * Q::from_integer(k.into()))) <= sigma);
        let m = set.member(&CircleElement::rational(beta), 64).unwrap();
        prop_assert_eq!(inside, m != Membership::Out);
    }

    #[test]
    fn rational_bohr_enumeration_matches_scan(
        gens in prop::collection::vec((1i64..60).prop_flat_map(|d| (0..d, Just(d))), 1..3),
        eps in sigma_strategy(12),
    ) {
        prop_assume!(eps < q(1, 2));
        let elems = gens.iter().map(|&(a, b)| CircleElement::ratio(a, b)).collect();
        let p = BohrParams::new(elems, eps.clone()).unwrap();
        let oracle: Vec<Gen> = gens.iter().map(|&(a, b)| Gen::Rat(a, b)).collect();
        prop_assert_eq!(enumerate_bohr(&p, 300).unwrap(), bohr_scan(&oracle, &eps, 300));
    }

    #[test]
    fn tagged_sequences_come_out_sorted(v in prop::collection::vec(0i64..10_000, 0..60)) {
        let c = CharSequence::from_tagged(v.iter().map(|&k| (k, Provenance::External)).collect()).unwrap();
        let expect: Vec<i64> = v.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        prop_assert_eq!(c.terms(), &expect[..]);
    }

    #[test]
    fn thin_respects_bounds_and_differences(
        steps in prop::collection::vec(1i64..50, 60..120),
        m_steps in prop::collection::vec(1i64..30, 2..16),
    ) {
        let base: Vec<i64> = steps.iter().scan(0, |s, d| { *s += d; Some(*s) }).collect();
        let m: Vec<i64> = m_steps.iter().scan(0, |s, d| { *s += d; Some(*s) }).collect();
        let c = CharSequence::external(base.clone()).unwrap();
        let out = thin(&c, &m);
        prop_assume!(out.is_ok());
        let t = out.unwrap();
        let t = t.terms();
        for (i, k) in t.iter().enumerate() {
            if let Some(b) = m.get(i + 1) {
                prop_assert!(*k > *b, "k_{} = {} not above m = {}", i + 2, k, b);
            }
        }
        for n in 0..t.len() / 2 {
            prop_assert_eq!(t[2 * n + 1] - t[2 * n], base[n]);
        }
    }

    #[test]
    fn interleave_alternates(a in prop::collection::vec(any::<i32>(), 0..30)) {
        let a: Vec<i64> = a.into_iter().map(i64::from).collect();
        let b: Vec<i64> = a.iter().map(|x| x.wrapping_mul(3)).collect();
        let out = interleave(&a, &b).unwrap();
        prop_assert_eq!(out.len(), 2 * a.len());
        for i in 0..a.len() {
            prop_assert_eq!(out[2 * i], a[i]);
            prop_assert_eq!(out[2 * i + 1], a[i] + b[i]);
        }
    }

    #[test]
    fn refined_basis_lies_in_both(
        d1 in 2i64..40, d2 in 2i64..40,
        e1 in sigma_strategy(10), e2 in sigma_strategy(10),
        chis in prop::collection::vec(1i64..2000, 20),
    ) {
        prop_assume!(e1 < q(1, 2) && e2 < q(1, 2));
        let a = FilterBasis::Subgroup(BohrParams::new(vec![CircleElement::ratio(1, d1)], e1).unwrap());
        let b = FilterBasis::Subgroup(BohrParams::new(vec![CircleElement::ratio(1, d2)], e2).unwrap());
        let r = a.refine(&b).unwrap();
        for chi in chis {
            if r.basis_member(chi).unwrap() {
                prop_assert!(a.basis_member(chi).unwrap() && b.basis_member(chi).unwrap());
            }
        }
    }

    #[test]
    fn homomorphism_basis_refines_soundly(
        a in 1i64..12, b in 1i64..12,
        chis in prop::collection::vec(1i64..500, 20),
    ) {
        let t1 = HomTarget::new(vec![(CircleElement::ratio(1, 12), CircleElement::ratio(a, 12))]).unwrap();
        let t2 = HomTarget::new(vec![(CircleElement::ratio(1, 6), CircleElement::ratio(2 * b, 12))]).unwrap();
        let x = FilterBasis::homomorphism(t1, q(1, 5)).unwrap();
        let y = FilterBasis::homomorphism(t2, q(1, 7)).unwrap();
        let r = x.refine(&y).unwrap();
        for chi in chis {
            if r.basis_member(chi).unwrap() {
                prop_assert!(x.basis_member(chi).unwrap() && y.basis_member(chi).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn padic_pair_difference_and_identity(p in prop::sample::select(vec![2u32, 3, 5, 7]), l_max in 1u32..3) {
        let s = PadicSpec::all_ones(p).unwrap();
        let n_max = 16;
        let c = build_sequence(&s, n_max).unwrap();
        let pb = BigInt::from(p);
        // c[i] holds c_{i+1}.
        for n in 1..n_max / 2 {
            let expect = Pow::pow(&pb, (2 * n + 1) as u32) - Pow::pow(&pb, (2 * n) as u32);
            prop_assert_eq!(&c[2 * n] - &c[2 * n - 1], expect);
        }
        let r = circle_convergence_set(&s, l_max, n_max, &[]).unwrap();
        prop_assert!(r.difference_identity);
        prop_assert!(r.probes.iter().all(|pr| pr.identity_holds));
        prop_assert!(r.converge0_is_subgroup);
        prop_assert!(r.converge0.contains(&Q::zero()));
    }
}
