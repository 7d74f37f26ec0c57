//! Filter bases over ℤ described by finitely many parameters.
//!
//! A subgroup basis set is `B(α₁…α_t, ε) ∖ Γ`; a homomorphism basis set is
//! `{χ : ‖χαᵢ − f(αᵢ)‖ ≤ ε}`. Filters are never materialized, only their
//! basis sets are queried.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bohr::{one_half, BohrParams, BohrTester};
use crate::circle::{check_sigma, CircleElement, Precision, PreparedElement, Rational, Threshold};
use crate::error::{Error, Result};
use crate::homomorphism::{check_solvable, filter_limit_from, FilterLimit, HomTarget};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterBasis {
    Subgroup(BohrParams),
    Homomorphism { target: HomTarget, epsilon: Rational },
}

/// Certified membership test for one basis set.
pub enum MemberTest {
    Subgroup { tester: BohrTester, excluded: BTreeSet<i64> },
    Homomorphism { rows: Vec<(PreparedElement, PreparedElement)>, threshold: Threshold },
}

impl MemberTest {
    pub fn contains(&self, chi: i64) -> Result<bool> {
        match self {
            MemberTest::Subgroup { tester, excluded } => Ok(!excluded.contains(&chi) && tester.contains(chi)?),
            MemberTest::Homomorphism { rows, threshold } => {
                for (a, b) in rows {
                    let centre = (!b.element().is_zero()).then_some(b);
                    match a.order_norm_shifted(chi, centre, threshold, Precision::default())?.le() {
                        Some(true) => {}
                        Some(false) => return Ok(false),
                        None => return Err(Error::UndecidableMembership(chi)),
                    }
                }
                Ok(true)
            }
        }
    }
}

impl FilterBasis {
    pub fn homomorphism(target: HomTarget, epsilon: Rational) -> Result<Self> {
        check_sigma(&epsilon, &one_half())?;
        Ok(FilterBasis::Homomorphism { target, epsilon })
    }

    pub fn epsilon(&self) -> &Rational {
        match self {
            FilterBasis::Subgroup(p) => &p.epsilon,
            FilterBasis::Homomorphism { epsilon, .. } => epsilon,
        }
    }

    pub fn member_test(&self) -> MemberTest {
        match self {
            FilterBasis::Subgroup(p) => MemberTest::Subgroup { tester: p.tester(), excluded: p.excluded.clone() },
            FilterBasis::Homomorphism { target, epsilon } => MemberTest::Homomorphism {
                rows: target
                    .pairs
                    .iter()
                    .map(|(a, b)| (PreparedElement::new(a.clone()), PreparedElement::new(b.clone())))
                    .collect(),
                threshold: Threshold::new(epsilon.clone()),
            },
        }
    }

    pub fn basis_member(&self, chi: i64) -> Result<bool> {
        self.member_test().contains(chi)
    }

    /// A descriptor whose set lies in both inputs: merged generators or
    /// pairs, the smaller ε and the union of exclusions.
    pub fn refine(&self, other: &FilterBasis) -> Result<FilterBasis> {
        match (self, other) {
            (FilterBasis::Subgroup(a), FilterBasis::Subgroup(b)) => {
                let mut gens = a.generators.clone();
                for g in &b.generators {
                    if !gens.contains(g) {
                        gens.push(g.clone());
                    }
                }
                let eps = a.epsilon.clone().min(b.epsilon.clone());
                Ok(FilterBasis::Subgroup(
                    BohrParams::new(gens, eps)?.excluding(a.excluded.iter().chain(&b.excluded).copied()),
                ))
            }
            (
                FilterBasis::Homomorphism { target: ta, epsilon: ea },
                FilterBasis::Homomorphism { target: tb, epsilon: eb },
            ) => {
                let mut pairs = ta.pairs.clone();
                for p in &tb.pairs {
                    if !pairs.contains(p) {
                        pairs.push(p.clone());
                    }
                }
                Ok(FilterBasis::Homomorphism { target: HomTarget::new(pairs)?, epsilon: ea.clone().min(eb.clone()) })
            }
            _ => Err(Error::Invalid("cannot refine basis sets of different kinds".into())),
        }
    }

    /// The same basis set with further characters excluded (subgroup kind)
    /// or, for the homomorphism kind, an equivalent scan floor.
    pub fn excluding(&self, more: impl IntoIterator<Item = i64>) -> FilterBasis {
        match self {
            FilterBasis::Subgroup(p) => FilterBasis::Subgroup(p.clone().excluding(more)),
            other => other.clone(),
        }
    }
}

/// Smallest positive member of the basis set, up to `search_bound`.
pub fn nonempty_witness(b: &FilterBasis, search_bound: u64) -> Result<i64> {
    nonempty_witness_from(b, 1, search_bound)
}

fn nonempty_witness_from(b: &FilterBasis, start: i64, search_bound: u64) -> Result<i64> {
    if let FilterBasis::Homomorphism { target, .. } = b {
        check_solvable(target)?;
    }
    let test = b.member_test();
    for chi in start.max(1)..=search_bound as i64 {
        if test.contains(chi)? {
            return Ok(chi);
        }
    }
    Err(Error::NotFound { bound: search_bound })
}

/// `count` distinct members found by repeatedly excluding the ones already
/// found (the subgroup kind grows Γ; the homomorphism kind scans past them).
pub fn iterated_witnesses(b: &FilterBasis, count: usize, search_bound: u64) -> Result<Vec<i64>> {
    let mut found: Vec<i64> = Vec::with_capacity(count);
    let mut current = b.clone();
    for _ in 0..count {
        let start = match current {
            FilterBasis::Subgroup(_) => 1,
            FilterBasis::Homomorphism { .. } => found.last().map_or(1, |k| k + 1),
        };
        let chi = nonempty_witness_from(&current, start, search_bound)?;
        found.push(chi);
        current = current.excluding([chi]);
    }
    Ok(found)
}

/// Divergence report for one basis set: `count` members χ with
/// `‖χβ − target‖ ≥ gap`, each found after excluding the previous ones.
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceWitnesses {
    pub witnesses: Vec<i64>,
    pub complete: bool,
}

pub fn divergence_witnesses(
    b: &FilterBasis,
    beta: &CircleElement,
    target: &CircleElement,
    gap: &Rational,
    count: usize,
    search_bound: u64,
) -> Result<DivergenceWitnesses> {
    let mut witnesses = Vec::with_capacity(count);
    let mut current = b.clone();
    while witnesses.len() < count {
        let start = match current {
            FilterBasis::Subgroup(_) => 1,
            FilterBasis::Homomorphism { .. } => witnesses.last().map_or(1, |k| k + 1),
        };
        match filter_limit_from(&current, beta, target, gap, start, search_bound)? {
            FilterLimit::Witness { chi } => {
                witnesses.push(chi);
                current = current.excluding([chi]);
            }
            FilterLimit::AllNear { .. } => break,
        }
    }
    let complete = witnesses.len() == count;
    Ok(DivergenceWitnesses { witnesses, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{sqrt2, sqrt3};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn subgroup(gens: Vec<CircleElement>, eps: Rational) -> FilterBasis {
        FilterBasis::Subgroup(BohrParams::new(gens, eps).unwrap())
    }

    #[test]
    fn membership_examples() {
        let b = FilterBasis::Subgroup(BohrParams::new(vec![CircleElement::ratio(1, 2)], r(1, 10)).unwrap().excluding([2]));
        assert!(b.basis_member(4).unwrap());
        assert!(!b.basis_member(2).unwrap());
        assert!(!b.basis_member(3).unwrap());
        let t = HomTarget::new(vec![(CircleElement::ratio(1, 4), CircleElement::ratio(3, 4))]).unwrap();
        let h = FilterBasis::homomorphism(t, r(1, 10)).unwrap();
        assert!(h.basis_member(3).unwrap());
        assert!(!h.basis_member(1).unwrap());
        let s = subgroup(vec![CircleElement::symbol(&sqrt2())], r(5, 100));
        assert!(s.basis_member(29).unwrap());
    }

    #[test]
    fn refinement() {
        let a = subgroup(vec![CircleElement::ratio(1, 2)], r(2, 10));
        let b = subgroup(vec![CircleElement::ratio(1, 3)], r(1, 10));
        let c = a.refine(&b).unwrap();
        assert_eq!(c, subgroup(vec![CircleElement::ratio(1, 2), CircleElement::ratio(1, 3)], r(1, 10)));
        assert_eq!(a.refine(&a).unwrap(), a);
        for chi in 1..200 {
            if c.basis_member(chi).unwrap() {
                assert!(a.basis_member(chi).unwrap() && b.basis_member(chi).unwrap());
            }
        }
    }

    #[test]
    fn witnesses() {
        assert_eq!(nonempty_witness(&subgroup(vec![CircleElement::ratio(1, 5)], r(1, 10)), 100).unwrap(), 5);
        let t = HomTarget::new(vec![(CircleElement::ratio(1, 4), CircleElement::ratio(3, 4))]).unwrap();
        assert_eq!(nonempty_witness(&FilterBasis::homomorphism(t, r(1, 100)).unwrap(), 100).unwrap(), 3);
        let both = subgroup(vec![CircleElement::symbol(&sqrt2()), CircleElement::symbol(&sqrt3())], r(5, 100));
        let k = nonempty_witness(&both, 1_000_000).unwrap();
        assert!(both.basis_member(k).unwrap());
        assert!((1..k).all(|j| !both.basis_member(j).unwrap()));
        let w = iterated_witnesses(&subgroup(vec![CircleElement::ratio(1, 5)], r(1, 10)), 5, 1000).unwrap();
        assert_eq!(w, vec![5, 10, 15, 20, 25]);
    }
}
