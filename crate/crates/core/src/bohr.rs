//! Bohr sets in ℤ, constraint sets on 𝕋, Kronecker-type searches and the
//! greedy separation step.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::circle::{
    check_sigma, ArcSet, CircleElement, NormOrdering, Precision, PreparedElement, Rational, Threshold,
};
use crate::error::{Error, Result};
use crate::lattice::RelationLattice;

pub fn one_third() -> Rational {
    Rational::new(1.into(), 3.into())
}

pub fn one_half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Parameters of `B(α₁…α_t, ε) ∖ Γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BohrParams {
    pub generators: Vec<CircleElement>,
    pub epsilon: Rational,
    pub excluded: BTreeSet<i64>,
}

impl BohrParams {
    pub fn new(generators: Vec<CircleElement>, epsilon: Rational) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Invalid("Bohr set needs at least one generator".into()));
        }
        check_sigma(&epsilon, &one_half())?;
        Ok(BohrParams { generators, epsilon, excluded: BTreeSet::new() })
    }

    pub fn excluding(mut self, excluded: impl IntoIterator<Item = i64>) -> Self {
        self.excluded.extend(excluded);
        self
    }

    pub fn tester(&self) -> BohrTester {
        BohrTester::new(&self.generators, &self.epsilon, Precision::default())
    }
}

/// Certified test of `‖kαᵢ‖ ≤ ε` for all i, ignoring Γ.
#[derive(Debug, Clone)]
pub struct BohrTester {
    prepared: Vec<PreparedElement>,
    threshold: Threshold,
    precision: Precision,
}

impl BohrTester {
    pub fn new(generators: &[CircleElement], epsilon: &Rational, precision: Precision) -> Self {
        BohrTester {
            prepared: generators.iter().cloned().map(PreparedElement::new).collect(),
            threshold: Threshold::new(epsilon.clone()),
            precision,
        }
    }

    pub fn contains(&self, k: i64) -> Result<bool> {
        for p in &self.prepared {
            match p.order_norm(k, &self.threshold, self.precision)?.le() {
                Some(true) => {}
                Some(false) => return Ok(false),
                None => return Err(Error::UndecidableMembership(k)),
            }
        }
        Ok(true)
    }
}

/// `{k ∈ [1, n] ∖ Γ : ‖kαᵢ‖ ≤ ε ∀i}` in increasing order.
pub fn enumerate_bohr(p: &BohrParams, n: u64) -> Result<Vec<i64>> {
    let tester = p.tester();
    let mut out = Vec::new();
    for k in 1..=n as i64 {
        if tester.contains(k)? {
            out.push(k);
        }
    }
    out.retain(|k| !p.excluded.contains(k));
    Ok(out)
}

/// Smallest `k > floor` in `B(α, ε) ∖ Γ`, scanning at most `bound` candidates.
pub fn first_bohr_above(p: &BohrParams, floor: i64, bound: u64) -> Result<Option<i64>> {
    let tester = p.tester();
    for k in floor + 1..=floor.saturating_add(bound as i64) {
        if !p.excluded.contains(&k) && tester.contains(k)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// `{β : ‖kβ‖ ≤ σ ∀k ∈ E}` as an exact arc set.
pub fn constraint_set(e: &BTreeSet<i64>, sigma: &Rational) -> Result<ArcSet> {
    if e.is_empty() || e.contains(&0) {
        return Err(Error::Invalid("constraint set needs a nonempty set of nonzero characters".into()));
    }
    check_sigma(sigma, &one_third())?;
    let mut ks: Vec<i64> = e.iter().map(|k| k.abs()).collect();
    ks.sort_unstable();
    ks.dedup();
    Ok(ks.iter().fold(ArcSet::full(), |acc, &k| acc.intersect_constraint(k, sigma)))
}

/// Open arc `{x : ‖x − center‖ < radius}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetArc {
    pub center: CircleElement,
    pub radius: Rational,
}

impl TargetArc {
    pub fn new(center: CircleElement, radius: Rational) -> Result<Self> {
        if !radius.is_positive() || radius > Rational::one() {
            return Err(Error::Invalid(format!("target radius {radius} must lie in (0, 1]")));
        }
        Ok(TargetArc { center, radius })
    }

    /// The open arc `(a, b)` with rational endpoints, `a < b`.
    pub fn between(a: Rational, b: Rational) -> Result<Self> {
        if a >= b {
            return Err(Error::Invalid("empty target arc".into()));
        }
        let two = Rational::from_integer(2.into());
        Self::new(CircleElement::rational((&a + &b) / &two), (b - a) / two)
    }
}

/// Simultaneous targets `kγᵢ ∈ Iᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KroneckerTarget {
    pub pairs: Vec<(CircleElement, TargetArc)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum KroneckerOutcome {
    Found(i64),
    /// `exhaustive` is set when the targets are periodic in k and a full
    /// period was scanned, so no solution exists at all.
    NotFound { bound: u64, exhaustive: bool },
}

impl KroneckerOutcome {
    pub fn found(&self) -> Option<i64> {
        match self {
            KroneckerOutcome::Found(k) => Some(*k),
            KroneckerOutcome::NotFound { .. } => None,
        }
    }
}

/// Certified test of `‖kγᵢ − cᵢ‖ < rᵢ` for all i.
pub struct KroneckerTester {
    rows: Vec<(PreparedElement, PreparedElement, Threshold)>,
    precision: Precision,
}

impl KroneckerTester {
    pub fn new(target: &KroneckerTarget) -> Self {
        KroneckerTester {
            rows: target
                .pairs
                .iter()
                .map(|(g, arc)| {
                    (
                        PreparedElement::new(g.clone()),
                        PreparedElement::new(arc.center.clone()),
                        Threshold::new(arc.radius.clone()),
                    )
                })
                .collect(),
            precision: Precision::default(),
        }
    }

    pub fn hits(&self, k: i64) -> Result<bool> {
        for (g, c, t) in &self.rows {
            let centre = if c.element().is_zero() { None } else { Some(c) };
            match g.order_norm_shifted(k, centre, t, self.precision)? {
                NormOrdering::Less => {}
                NormOrdering::Equal | NormOrdering::Greater => return Ok(false),
                NormOrdering::Undecidable => return Err(Error::UndecidableMembership(k)),
            }
        }
        Ok(true)
    }
}

/// Period of `k ↦ (kγᵢ)` when every γᵢ is rational.
fn rational_period(target: &KroneckerTarget) -> Option<BigInt> {
    target.pairs.iter().try_fold(BigInt::one(), |acc, (g, _)| {
        g.is_rational().then(|| acc.lcm(g.rational_part().denom()))
    })
}

/// Smallest `k ∈ [1, bound]` with `kγᵢ ∈ Iᵢ` for all i.
pub fn kronecker_solve(target: &KroneckerTarget, lattice: &RelationLattice, bound: u64) -> Result<KroneckerOutcome> {
    kronecker_solve_from(target, lattice, 1, bound)
}

/// Smallest `k ∈ [start, bound]` with `kγᵢ ∈ Iᵢ` for all i.
pub fn kronecker_solve_from(
    target: &KroneckerTarget,
    lattice: &RelationLattice,
    start: i64,
    bound: u64,
) -> Result<KroneckerOutcome> {
    let tester = KroneckerTester::new(target);
    // a full-rank relation lattice means the γᵢ generate a finite group, so
    // one period of candidates decides solvability
    let period = if lattice.is_full_rank() { rational_period(target).and_then(|p| p.to_u64()) } else { None };
    let last = match period {
        Some(p) => (bound as i64).min(start.saturating_add(p as i64 - 1)),
        None => bound as i64,
    };
    for k in start.max(1)..=last {
        if tester.hits(k)? {
            return Ok(KroneckerOutcome::Found(k));
        }
    }
    let exhaustive = period.is_some_and(|p| (last - start.max(1) + 1) as u64 >= p);
    Ok(KroneckerOutcome::NotFound { bound, exhaustive })
}

/// A separating set together with its exact constraint set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub characters: BTreeSet<i64>,
    pub constraint: ArcSet,
    /// Largest candidate examined.
    pub scanned: u64,
}

/// Greedy search for a finite `E ⊆ B(α, ε) ∖ Γ` with
/// `{β : ‖kβ‖ ≤ σ ∀k ∈ E} ⊆ V`.
///
/// Candidates are taken in increasing order and kept only when they strictly
/// shrink the current constraint set.
pub fn separate(p: &BohrParams, sigma: &Rational, v: &ArcSet, budget: u64) -> Result<Separation> {
    check_sigma(sigma, &one_third())?;
    let tester = p.tester();
    let mut chosen = BTreeSet::new();
    let mut current = ArcSet::full();
    for k in 1..=budget as i64 {
        if p.excluded.contains(&k) {
            continue;
        }
        if !chosen.is_empty() && current.within_constraint(k, sigma) {
            continue;
        }
        if !tester.contains(k)? {
            continue;
        }
        current = current.intersect_constraint(k, sigma);
        chosen.insert(k);
        if v.contains(&current) {
            return Ok(Separation { characters: chosen, constraint: current, scanned: k as u64 });
        }
    }
    Err(Error::BudgetExceeded { budget, stage: None })
}

/// Norm of a nonzero rational multiple; convenience for exact tests.
pub fn exact_norm(alpha: &Rational, k: i64) -> Rational {
    crate::circle::rational_norm(&(alpha * Rational::from_integer(k.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::sqrt2;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn s2() -> CircleElement {
        CircleElement::symbol(&sqrt2())
    }

    #[test]
    fn bohr_multiples_of_five() {
        let p = BohrParams::new(vec![CircleElement::ratio(1, 5)], r(1, 10)).unwrap();
        assert_eq!(enumerate_bohr(&p, 30).unwrap(), vec![5, 10, 15, 20, 25, 30]);
        let p = p.excluding([10, 20]);
        assert_eq!(enumerate_bohr(&p, 30).unwrap(), vec![5, 15, 25, 30]);
        assert!(matches!(
            BohrParams::new(vec![CircleElement::ratio(1, 2)], r(6, 10)),
            Err(Error::Circle(_))
        ));
    }

    #[test]
    fn bohr_sqrt2() {
        let p = BohrParams::new(vec![s2()], r(5, 100)).unwrap();
        let b = enumerate_bohr(&p, 100).unwrap();
        for k in [29, 70, 99] {
            assert!(b.contains(&k));
        }
        assert!(!b.contains(&5));
    }

    #[test]
    fn constraint_sets() {
        let c = constraint_set(&BTreeSet::from([1]), &r(1, 10)).unwrap();
        assert_eq!(c.arcs(), vec![(r(9, 10), r(11, 10))]);
        let c = constraint_set(&BTreeSet::from([2, 3]), &r(1, 10)).unwrap();
        let expected = ArcSet::from_constraint(2, &r(1, 10)).unwrap().intersect(&ArcSet::from_constraint(3, &r(1, 10)).unwrap());
        assert_eq!(c, expected);
        let c = constraint_set(&BTreeSet::from([5, 7]), &r(1, 100)).unwrap();
        assert!(c.measure() <= r(2, 100));
        assert!(constraint_set(&BTreeSet::from([1]), &r(1, 3)).is_err());
    }

    #[test]
    fn kronecker_examples() {
        let lattice = RelationLattice::of(&[CircleElement::ratio(1, 4)]);
        let t = KroneckerTarget { pairs: vec![(CircleElement::ratio(1, 4), TargetArc::between(r(24, 100), r(26, 100)).unwrap())] };
        assert_eq!(kronecker_solve(&t, &lattice, 100).unwrap(), KroneckerOutcome::Found(1));
        let t = KroneckerTarget { pairs: vec![(CircleElement::ratio(1, 4), TargetArc::between(r(30, 100), r(40, 100)).unwrap())] };
        assert_eq!(
            kronecker_solve(&t, &lattice, 100).unwrap(),
            KroneckerOutcome::NotFound { bound: 100, exhaustive: true }
        );
        let half = RelationLattice::of(&[CircleElement::ratio(1, 2)]);
        let t = KroneckerTarget { pairs: vec![(CircleElement::ratio(1, 2), TargetArc::between(r(4, 10), r(6, 10)).unwrap())] };
        assert_eq!(kronecker_solve(&t, &half, 10).unwrap(), KroneckerOutcome::Found(1));
    }

    #[test]
    fn kronecker_sqrt2_near_half() {
        let lattice = RelationLattice::of(&[s2()]);
        let t = KroneckerTarget { pairs: vec![(s2(), TargetArc::between(r(49, 100), r(51, 100)).unwrap())] };
        let k = kronecker_solve(&t, &lattice, 10_000).unwrap().found().unwrap();
        // independent check with f64 is enough here: margins are far from rounding
        let frac = |k: i64| (k as f64 * std::f64::consts::SQRT_2).fract();
        assert!((frac(k) - 0.5).abs() < 0.01);
        assert!((1..k).all(|j| (frac(j) - 0.5).abs() >= 0.01));
    }

    #[test]
    fn separation_examples() {
        let p = BohrParams::new(vec![CircleElement::zero()], r(1, 10)).unwrap();
        let v = ArcSet::from_arcs([(r(-2, 10), r(2, 10))]);
        let s = separate(&p, &r(1, 10), &v, 100).unwrap();
        assert_eq!(s.characters, BTreeSet::from([1]));

        let p = BohrParams::new(vec![CircleElement::ratio(1, 3)], r(1, 10)).unwrap();
        let v = ArcSet::from_arcs((0..3).map(|j| (r(j, 3) - r(1, 20), r(j, 3) + r(1, 20))));
        let s = separate(&p, &r(1, 10), &v, 10_000).unwrap();
        assert!(s.characters.iter().all(|k| k % 3 == 0));
        assert!(v.contains(&constraint_set(&s.characters, &r(1, 10)).unwrap()));

        assert!(matches!(separate(&p, &r(1, 10), &ArcSet::empty(), 500), Err(Error::BudgetExceeded { .. })));
    }
}
