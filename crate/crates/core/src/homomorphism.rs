//! Homomorphisms H → 𝕋 as pointwise limits of integer characters, the
//! interleaving trick that makes H the exact set of convergence, and
//! prefix-level limit classification.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bohr::{kronecker_solve, one_half, KroneckerOutcome, KroneckerTarget, TargetArc};
use crate::characterize::{ser_opt_rational_down, ser_rational, ser_rational_up};
use crate::circle::{decimal_string, CircleElement, NormOrdering, Precision, PreparedElement, Rational, Threshold};
use crate::error::{Error, Result};
use crate::filters::FilterBasis;
use crate::lattice::RelationLattice;

/// Prescribed values `f(αᵢ) = βᵢ` on finitely many elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomTarget {
    pub pairs: Vec<(CircleElement, CircleElement)>,
}

impl HomTarget {
    pub fn new(pairs: Vec<(CircleElement, CircleElement)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Invalid("homomorphism needs at least one pair".into()));
        }
        Ok(HomTarget { pairs })
    }

    pub fn sources(&self) -> Vec<CircleElement> {
        self.pairs.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn lattice(&self) -> RelationLattice {
        RelationLattice::of(&self.sources())
    }
}

/// Checks that every relation `Σ hᵢαᵢ ∈ ℤ` of the sources also holds for
/// the images; the first violating basis relation is returned as an error.
pub fn check_solvable(t: &HomTarget) -> Result<()> {
    check_solvable_with(t, &t.lattice())
}

pub fn check_solvable_with(t: &HomTarget, lattice: &RelationLattice) -> Result<()> {
    for h in &lattice.basis {
        let image = t
            .pairs
            .iter()
            .zip(h)
            .fold(CircleElement::zero(), |acc, ((_, b), hi)| &acc + &b.mul_big(hi));
        if !image.is_zero() {
            return Err(Error::RelationViolation { h: h.clone() });
        }
    }
    Ok(())
}

/// Smallest χ ≥ 1 with `‖χαᵢ − βᵢ‖ < 1/n` for `i ≤ min(n, pairs)`.
pub fn realize(t: &HomTarget, n: usize, search_bound: u64) -> Result<i64> {
    let radius = Rational::new(BigInt::one(), BigInt::from(n.max(1)));
    let used = &t.pairs[..n.min(t.pairs.len())];
    let pairs = used
        .iter()
        .map(|(a, b)| Ok((a.clone(), TargetArc::new(b.clone(), radius.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    let lattice = RelationLattice::of(&used.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>());
    match kronecker_solve(&KroneckerTarget { pairs }, &lattice, search_bound)? {
        KroneckerOutcome::Found(k) => Ok(k),
        KroneckerOutcome::NotFound { bound, .. } => Err(Error::NotFound { bound }),
    }
}

/// `χ₁, …, χ_{n_max}` after checking solvability.
pub fn realize_sequence(t: &HomTarget, n_max: usize, search_bound: u64) -> Result<Vec<i64>> {
    check_solvable(t)?;
    (1..=n_max).map(|n| realize(t, n, search_bound)).collect()
}

/// `[χ₁, χ₁ + χ̃₁, χ₂, χ₂ + χ̃₂, …]`.
pub fn interleave(primary: &[i64], divergence_maker: &[i64]) -> Result<Vec<i64>> {
    if primary.len() != divergence_maker.len() {
        return Err(Error::LengthMismatch(primary.len(), divergence_maker.len()));
    }
    primary
        .iter()
        .zip(divergence_maker)
        .try_fold(Vec::with_capacity(2 * primary.len()), |mut out, (&a, &b)| {
            out.push(a);
            out.push(a.checked_add(b).ok_or_else(|| Error::Invalid("term overflow".into()))?);
            Ok(out)
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum LimitVerdict {
    /// The tail values fit in an arc no wider than the tolerance; `center`
    /// is the arc midpoint (decimal, 20 digits).
    ConsistentWith { center: String },
    /// Two tail terms whose values are certified to be at least `gap` apart.
    DivergenceWitnessed { first: i64, second: i64 },
    Inconclusive,
}

/// Prefix-level evidence about the limit of `kβ` along a sequence.
#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub probe: String,
    pub tail_len: usize,
    /// Smallest arc `[lo, hi]` (hi may exceed 1) containing every tail value.
    #[serde(serialize_with = "ser_rational_down_str")]
    pub hull_lo: Rational,
    #[serde(serialize_with = "ser_rational_up")]
    pub hull_hi: Rational,
    #[serde(serialize_with = "ser_rational_up")]
    pub hull_width: Rational,
    /// Upper bound on `max ‖(χₙ − χₘ)β‖` over tail pairs.
    #[serde(serialize_with = "ser_rational_up")]
    pub oscillation: Rational,
    #[serde(serialize_with = "ser_opt_rational_down")]
    pub witnessed_gap: Option<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub gap: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub tolerance: Rational,
    pub verdict: LimitVerdict,
    pub note: &'static str,
}

fn ser_rational_down_str<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&decimal_string(q, 20, false))
}

impl LimitReport {
    /// Whether `x` lies (as a point of 𝕋) within the certified hull.
    pub fn hull_contains(&self, x: &CircleElement) -> Result<bool> {
        let enc = x.enclose(96)?;
        let shift = enc.lo_rational().floor();
        let (lo, hi) = (enc.lo_rational() - &shift, enc.hi_rational() - &shift);
        let one = Rational::one();
        Ok([Rational::zero(), one.clone(), -one].iter().any(|d| self.hull_lo <= &lo + d && &hi + d <= self.hull_hi))
    }

    pub fn center(&self) -> Rational {
        (&self.hull_lo + &self.hull_hi) / Rational::from_integer(2.into())
    }
}

/// Classifies the behaviour of `kβ` over the last `tail_window` terms.
///
/// Divergence needs a certified pair at distance ≥ `gap`; consistency
/// needs the tail values to fit in an arc of width ≤ `tolerance`.
pub fn classify_limit(
    seq: &[i64],
    beta: &CircleElement,
    tail_window: usize,
    gap: &Rational,
    tolerance: &Rational,
) -> Result<LimitReport> {
    if seq.is_empty() {
        return Err(Error::Invalid("cannot classify an empty sequence".into()));
    }
    let tail = &seq[seq.len() - tail_window.clamp(1, seq.len())..];
    let prepared = PreparedElement::new(beta.clone());
    let bits = 96;
    let mut points: Vec<(Rational, Rational)> = Vec::with_capacity(tail.len());
    for &k in tail {
        let e = beta.mul_int(k).enclose(bits)?;
        let shift = e.lo_rational().floor();
        points.push((e.lo_rational() - &shift, e.hi_rational() - shift));
    }
    let (hull_lo, hull_hi) = circular_hull(&points);
    let hull_width = &hull_hi - &hull_lo;
    let threshold = Threshold::new(gap.clone());
    let mut oscillation = Rational::zero();
    let mut witness = None;
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            let d = tail[j] - tail[i];
            let ub = prepared.norm(d, bits)?.hi;
            if ub > oscillation {
                oscillation = ub;
            }
            if witness.is_none() {
                match prepared.order_norm(d, &threshold, Precision::default())? {
                    NormOrdering::Greater | NormOrdering::Equal => {
                        witness = Some((tail[i], tail[j], prepared.norm(d, bits)?.lo))
                    }
                    NormOrdering::Less => {}
                    NormOrdering::Undecidable => return Err(Error::UndecidableMembership(d)),
                }
            }
        }
    }
    let half = one_half();
    if oscillation > half {
        oscillation = half;
    }
    let verdict = if let Some((a, b, _)) = &witness {
        LimitVerdict::DivergenceWitnessed { first: *a, second: *b }
    } else if hull_width <= *tolerance {
        let c = (&hull_lo + &hull_hi) / Rational::from_integer(2.into());
        LimitVerdict::ConsistentWith { center: decimal_string(&crate::circle::frac(&c), 20, false) }
    } else {
        LimitVerdict::Inconclusive
    };
    Ok(LimitReport {
        probe: beta.to_string(),
        tail_len: tail.len(),
        hull_lo,
        hull_hi,
        hull_width,
        oscillation,
        witnessed_gap: witness.map(|w| w.2),
        gap: gap.clone(),
        tolerance: tolerance.clone(),
        verdict,
        note: "finite-prefix evidence: a verdict refutes or is consistent with a limit, it never proves one",
    })
}

/// Smallest arc covering a set of enclosed points of [0, 1): the complement
/// of the widest certified empty gap between cyclically adjacent points.
fn circular_hull(points: &[(Rational, Rational)]) -> (Rational, Rational) {
    let mut pts = points.to_vec();
    pts.sort();
    let n = pts.len();
    let one = Rational::one();
    let mut best: Option<(Rational, usize)> = None;
    for i in 0..n {
        // gap after point i: from hi_i to lo_{i+1} (wrapping)
        let next_lo = if i + 1 < n { pts[i + 1].0.clone() } else { &pts[0].0 + &one };
        let gap = next_lo - &pts[i].1;
        if best.as_ref().is_none_or(|(g, _)| gap > *g) {
            best = Some((gap, i));
        }
    }
    let (gap, i) = best.unwrap();
    if gap <= Rational::zero() {
        return (Rational::zero(), one);
    }
    let start = pts[(i + 1) % n].0.clone();
    let end_point = pts[i].1.clone();
    let end = if i + 1 < n { end_point + &one } else { end_point };
    let width = &end - &start;
    if width >= one {
        (Rational::zero(), one)
    } else {
        (start, end)
    }
}

/// Outcome of a filter-limit query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum FilterLimit {
    /// No basis member up to `bound` moves β away from the target.
    AllNear { bound: u64 },
    /// A basis member with `‖χβ − target‖ ≥ gap`.
    Witness { chi: i64 },
}

/// Smallest χ in the basis set with `‖χβ − target‖ ≥ gap`.
pub fn filter_limit(
    basis: &FilterBasis,
    beta: &CircleElement,
    target: &CircleElement,
    gap: &Rational,
    search_bound: u64,
) -> Result<FilterLimit> {
    filter_limit_from(basis, beta, target, gap, 1, search_bound)
}

/// As [`filter_limit`], scanning χ from `start`.
pub fn filter_limit_from(
    basis: &FilterBasis,
    beta: &CircleElement,
    target: &CircleElement,
    gap: &Rational,
    start: i64,
    search_bound: u64,
) -> Result<FilterLimit> {
    let prepared = PreparedElement::new(beta.clone());
    let centre = (!target.is_zero()).then(|| PreparedElement::new(target.clone()));
    let threshold = Threshold::new(gap.clone());
    let member = basis.member_test();
    for chi in start.max(1)..=search_bound as i64 {
        if !member.contains(chi)? {
            continue;
        }
        match prepared.order_norm_shifted(chi, centre.as_ref(), &threshold, Precision::default())? {
            NormOrdering::Greater | NormOrdering::Equal => return Ok(FilterLimit::Witness { chi }),
            NormOrdering::Less => {}
            NormOrdering::Undecidable => return Err(Error::UndecidableMembership(chi)),
        }
    }
    Ok(FilterLimit::AllNear { bound: search_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::BohrParams;
    use crate::constants::{sqrt2, sqrt3};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn solvability_gate() {
        let bad = HomTarget::new(vec![(CircleElement::ratio(1, 4), CircleElement::ratio(1, 3))]).unwrap();
        assert_eq!(check_solvable(&bad), Err(Error::RelationViolation { h: vec![BigInt::from(4)] }));
        let good = HomTarget::new(vec![(CircleElement::ratio(1, 4), CircleElement::ratio(3, 4))]).unwrap();
        assert!(check_solvable(&good).is_ok());
        assert_eq!(realize(&good, 4, 100).unwrap(), 3);
        let free = HomTarget::new(vec![(CircleElement::symbol(&sqrt2()), CircleElement::symbol(&sqrt3()))]).unwrap();
        assert!(check_solvable(&free).is_ok());
    }

    #[test]
    fn realize_sqrt2_to_sqrt3() {
        let t = HomTarget::new(vec![(CircleElement::symbol(&sqrt2()), CircleElement::symbol(&sqrt3()))]).unwrap();
        let k = realize(&t, 5, 10_000).unwrap();
        let f = |k: i64| {
            let x = (k as f64 * std::f64::consts::SQRT_2 - 3f64.sqrt()).rem_euclid(1.0);
            x.min(1.0 - x)
        };
        assert!(f(k) < 0.2);
        assert!((1..k).all(|j| f(j) >= 0.2));
    }

    #[test]
    fn interleaving() {
        assert_eq!(interleave(&[1, 2, 3], &[10, 20, 30]).unwrap(), vec![1, 11, 2, 22, 3, 33]);
        assert_eq!(interleave(&[4, 5], &[0, 0]).unwrap(), vec![4, 4, 5, 5]);
        assert_eq!(interleave(&[1], &[]), Err(Error::LengthMismatch(1, 0)));
    }

    #[test]
    fn classify_examples() {
        let quarter = CircleElement::ratio(1, 4);
        let seq: Vec<i64> = (1..=20).map(|j| 4 * j).collect();
        let rep = classify_limit(&seq, &quarter, 10, &r(1, 4), &r(1, 8)).unwrap();
        assert_eq!(rep.verdict, LimitVerdict::ConsistentWith { center: "0.00000000000000000000".into() });
        assert!(rep.oscillation.is_zero());
        let alt: Vec<i64> = (0..20).map(|j| if j % 2 == 0 { 1 } else { 3 }).collect();
        let rep = classify_limit(&alt, &quarter, 10, &r(1, 4), &r(1, 8)).unwrap();
        assert!(matches!(rep.verdict, LimitVerdict::DivergenceWitnessed { .. }));
        assert_eq!(rep.witnessed_gap, Some(r(1, 2)));
    }

    #[test]
    fn hull_wraps_through_zero() {
        let pts = vec![(r(95, 100), r(95, 100)), (r(2, 100), r(2, 100)), (r(1, 100), r(1, 100))];
        assert_eq!(circular_hull(&pts), (r(95, 100), r(102, 100)));
    }

    #[test]
    fn filter_limit_half() {
        let basis = FilterBasis::Subgroup(BohrParams::new(vec![CircleElement::ratio(1, 2)], r(1, 10)).unwrap());
        let w = filter_limit(&basis, &CircleElement::ratio(1, 4), &CircleElement::zero(), &r(1, 4), 100).unwrap();
        assert_eq!(w, FilterLimit::Witness { chi: 2 });
        let w = filter_limit(&basis, &CircleElement::ratio(1, 2), &CircleElement::zero(), &r(1, 4), 1000).unwrap();
        assert_eq!(w, FilterLimit::AllNear { bound: 1000 });
    }
}
