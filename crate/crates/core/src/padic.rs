//! A sequence of integers that converges p-adically to a non-integer while
//! `cₙα → 0` in 𝕋 only for finitely many α.
//!
//! With digits `k₁ = 1, k₂, …` in `{0..p−1}`, set
//! `h_{2n} = h_{2n+1} = Σ_{i≤n} kᵢpⁱ` and `cₙ = pⁿ + hₙ`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::characterize::ser_rational;
use crate::circle::{frac, rational_norm, Rational};
use crate::error::{Error, Result};

/// How the digits `kᵢ` (i ≥ 1) are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitRule {
    AllOnes,
    /// `kᵢ = pattern[(i − 1) mod len]`; the first entry must be 1.
    Periodic(Vec<u32>),
    /// Finitely many explicit digits plus a free-text claim that infinitely
    /// many later digits are nonzero. Only the listed digits can be used.
    Custom { digits: Vec<u32>, certificate: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicSpec {
    pub p: u32,
    pub rule: DigitRule,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl PadicSpec {
    pub fn new(p: u32, rule: DigitRule) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let check = |ds: &[u32]| -> Result<()> {
            if ds.first() != Some(&1) {
                return Err(Error::Invalid("the first digit must be 1".into()));
            }
            if let Some(d) = ds.iter().find(|&&d| d >= p) {
                return Err(Error::Invalid(format!("digit {d} out of range for p = {p}")));
            }
            Ok(())
        };
        match &rule {
            DigitRule::AllOnes => {}
            DigitRule::Periodic(pat) => check(pat)?,
            DigitRule::Custom { digits, certificate } => {
                check(digits)?;
                if certificate.trim().is_empty() {
                    return Err(Error::Invalid("custom digit rules need a certificate".into()));
                }
            }
        }
        Ok(PadicSpec { p, rule })
    }

    pub fn all_ones(p: u32) -> Result<Self> {
        Self::new(p, DigitRule::AllOnes)
    }

    /// `kᵢ` for `i ≥ 1`.
    pub fn digit(&self, i: usize) -> Result<u32> {
        assert!(i >= 1, "digits are indexed from 1");
        match &self.rule {
            DigitRule::AllOnes => Ok(1),
            DigitRule::Periodic(pat) => Ok(pat[(i - 1) % pat.len()]),
            DigitRule::Custom { digits, .. } => {
                digits.get(i - 1).copied().ok_or(Error::ExhaustedSource(i))
            }
        }
    }

    fn prime(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// `hₙ` for `n ≥ 1`.
    pub fn h(&self, n: usize) -> Result<BigInt> {
        let p = self.prime();
        let mut acc = BigInt::zero();
        let mut pow = BigInt::one();
        for i in 1..=n / 2 {
            pow *= &p;
            acc += &pow * self.digit(i)?;
        }
        Ok(acc)
    }
}

/// `c₁, …, c_{n_max}`.
pub fn build_sequence(s: &PadicSpec, n_max: usize) -> Result<Vec<BigInt>> {
    if n_max == 0 {
        return Err(Error::Invalid("n_max must be at least 1".into()));
    }
    let p = s.prime();
    (1..=n_max).map(|n| Ok(Pow::pow(&p, n) + s.h(n)?)).collect()
}

/// `v_p(x)`; `None` for zero.
pub fn valuation(x: &BigInt, p: u32) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// A p-adic integer truncated to finitely many base-p digits (least
/// significant first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicInt {
    pub p: u32,
    pub digits: Vec<u32>,
}

impl PadicInt {
    /// Digits of `x mod p^precision`.
    pub fn from_integer(x: &BigInt, p: u32, precision: usize) -> Self {
        let pb = BigInt::from(p);
        let mut x = x.mod_floor(&Pow::pow(&pb, precision));
        let mut digits = Vec::with_capacity(precision);
        for _ in 0..precision {
            let (q, r) = x.div_rem(&pb);
            digits.push(r.try_into().unwrap());
            x = q;
        }
        PadicInt { p, digits }
    }

    /// The limit `h = Σ kᵢpⁱ` to `precision` digits.
    pub fn limit_of(s: &PadicSpec, precision: usize) -> Result<Self> {
        let mut digits = vec![0];
        for i in 1..precision {
            digits.push(s.digit(i)?);
        }
        digits.truncate(precision);
        Ok(PadicInt { p: s.p, digits })
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// Number of leading digits shared with `other`.
    pub fn agreement(&self, other: &PadicInt) -> usize {
        self.digits.iter().zip(&other.digits).take_while(|(a, b)| a == b).count()
    }

    pub fn to_integer(&self) -> BigInt {
        let p = BigInt::from(self.p);
        self.digits.iter().rev().fold(BigInt::zero(), |acc, &d| acc * &p + d)
    }
}

fn ser_big<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_bigs<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

fn ser_rationals<S: Serializer>(xs: &BTreeSet<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ValuationRow {
    pub n: usize,
    #[serde(serialize_with = "ser_big")]
    pub difference: BigInt,
    /// `v_p(c_{n+1} − cₙ)`.
    pub valuation: Option<u32>,
    /// `min v_p(c_m − c_{m'})` over `n ≤ m' < m ≤ n_max`.
    pub tail_min: Option<u32>,
    /// Leading digits of `cₙ` that agree with the limit.
    pub agreement_with_limit: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PadicLimitReport {
    pub p: u32,
    pub n_max: usize,
    #[serde(serialize_with = "ser_bigs")]
    pub terms: Vec<BigInt>,
    pub table: Vec<ValuationRow>,
    /// `tail_min` never decreases and ends above where it started.
    pub cauchy: bool,
    /// `v_p(c_{2n+1} − c_{2n}) = 2n` strictly increases along even `n`.
    pub even_valuations: Vec<(usize, Option<u32>)>,
    pub even_strictly_increasing: bool,
    pub limit_digits: PadicInt,
    /// For every index N < n_max some digit of the limit beyond N is
    /// nonzero within the materialized precision.
    pub nonzero_beyond_every_index: bool,
    pub note: &'static str,
}

/// Valuation table and finite-precision evidence that the limit is not an
/// ordinary integer.
pub fn padic_limit_check(s: &PadicSpec, n_max: usize) -> Result<PadicLimitReport> {
    let terms = build_sequence(s, n_max)?;
    // enough digits to see the agreement of every term with the limit
    let precision = n_max + 2;
    let limit = PadicInt::limit_of(s, precision)?;
    let mut table = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (difference, v) = if n < n_max {
            let d = &terms[n] - &terms[n - 1];
            let v = valuation(&d, s.p);
            (d, v)
        } else {
            (BigInt::zero(), None)
        };
        let mut tail_min: Option<u32> = None;
        for a in n - 1..n_max {
            for b in a + 1..n_max {
                let v = valuation(&(&terms[b] - &terms[a]), s.p);
                tail_min = match (tail_min, v) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (None, y) => y,
                    (x, None) => x,
                };
            }
        }
        let agreement = PadicInt::from_integer(&terms[n - 1], s.p, precision).agreement(&limit);
        table.push(ValuationRow { n, difference, valuation: v, tail_min, agreement_with_limit: agreement });
    }
    let mins: Vec<u32> = table.iter().filter_map(|r| r.tail_min).collect();
    let cauchy = mins.windows(2).all(|w| w[0] <= w[1]) && (mins.len() < 2 || mins.last() > mins.first());
    let even_valuations: Vec<(usize, Option<u32>)> =
        table.iter().filter(|r| r.n % 2 == 0 && r.n < n_max).map(|r| (r.n, r.valuation)).collect();
    let even_strictly_increasing = even_valuations.windows(2).all(|w| matches!((w[0].1, w[1].1), (Some(a), Some(b)) if a < b));
    let nonzero_beyond_every_index =
        (0..n_max).all(|big_n| limit.digits.iter().skip(big_n + 1).any(|&d| d != 0));
    Ok(PadicLimitReport {
        p: s.p,
        n_max,
        terms,
        table,
        cauchy,
        even_valuations,
        even_strictly_increasing,
        limit_digits: limit,
        nonzero_beyond_every_index,
        note: "finite-precision evidence that the limit lies outside the integers, not a proof",
    })
}

/// Whether `‖cₙα‖` tends to 0 along the materialized prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PadicVerdict {
    /// Constant tail value 0.
    Converge0,
    /// Constant nonzero tail value, so `cₙα` does not tend to 0.
    Diverge,
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerProbe {
    pub l: u32,
    pub a: u64,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    /// `‖(a/p^l) Σ_{i≤l} kᵢpⁱ‖`.
    #[serde(serialize_with = "ser_rational")]
    pub constant: Rational,
    /// Tail limit point `(a/p^l) Σ_{i≤l} kᵢpⁱ mod 1`.
    #[serde(serialize_with = "ser_rational")]
    pub limit_point: Rational,
    /// Indices `n ≥ 2l` at which the identity was checked.
    pub checked: usize,
    pub identity_holds: bool,
    pub verdict: PadicVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtraProbe {
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub tail_max: Rational,
    pub tail_len: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub p: u32,
    pub l_max: u32,
    pub n_max: usize,
    pub probes: Vec<PowerProbe>,
    /// Reduced values of the probes classified `Converge0`.
    #[serde(serialize_with = "ser_rationals")]
    pub converge0: BTreeSet<Rational>,
    pub converge0_is_subgroup: bool,
    /// `c_{2n+1} − c_{2n} = p^{2n}(p − 1)` for every materialized pair, so
    /// a convergent α must have `p^{2n}(p−1)α → 0`.
    pub difference_identity: bool,
    pub extra: Vec<ExtraProbe>,
}

/// Exact classification of every `a/p^l` with `l ≤ l_max`, plus optional
/// rational probes evaluated directly on the last `tail` terms.
pub fn circle_convergence_set(
    s: &PadicSpec,
    l_max: u32,
    n_max: usize,
    extra: &[Rational],
) -> Result<ConvergenceReport> {
    if l_max == 0 {
        return Err(Error::Invalid("l_max must be at least 1".into()));
    }
    let terms = build_sequence(s, n_max)?;
    let p = s.prime();
    let mut probes = Vec::new();
    let mut converge0 = BTreeSet::new();
    for l in 1..=l_max {
        let modulus = Pow::pow(&p, l);
        let sum_l = s.h(2 * l as usize)?;
        let count: u64 = modulus.clone().try_into().map_err(|_| Error::Invalid("p^l too large".into()))?;
        for a in 0..count {
            let alpha = Rational::new(BigInt::from(a), modulus.clone());
            let limit_point = frac(&(&alpha * Rational::from_integer(sum_l.clone())));
            let constant = rational_norm(&limit_point);
            let mut checked = 0;
            let mut identity_holds = true;
            for n in 2 * l as usize..=n_max {
                checked += 1;
                let value = frac(&(&alpha * Rational::from_integer(terms[n - 1].clone())));
                identity_holds &= value == limit_point;
            }
            let verdict = if constant.is_zero() { PadicVerdict::Converge0 } else { PadicVerdict::Diverge };
            if verdict == PadicVerdict::Converge0 {
                converge0.insert(alpha.clone());
            }
            probes.push(PowerProbe { l, a, alpha, constant, limit_point, checked, identity_holds, verdict });
        }
    }
    let converge0_is_subgroup =
        converge0.iter().all(|x| converge0.iter().all(|y| converge0.contains(&frac(&(x + y)))));
    let pm1 = &p - 1;
    let difference_identity =
        (1..).take_while(|n| 2 * n < n_max).all(|n| &terms[2 * n] - &terms[2 * n - 1] == Pow::pow(&p, 2 * n) * &pm1);
    let tail = n_max.div_ceil(2);
    let extra = extra
        .iter()
        .map(|alpha| {
            let tail_max = terms[n_max - tail..]
                .iter()
                .map(|c| rational_norm(&(alpha * Rational::from_integer(c.clone()))))
                .max()
                .unwrap_or_else(Rational::zero);
            ExtraProbe { alpha: alpha.clone(), tail_max, tail_len: tail }
        })
        .collect();
    Ok(ConvergenceReport { p: s.p, l_max, n_max, probes, converge0, converge0_is_subgroup, difference_identity, extra })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn sequences() {
        let s3 = PadicSpec::all_ones(3).unwrap();
        assert_eq!(build_sequence(&s3, 5).unwrap(), ints(&[3, 12, 30, 93, 255]));
        assert_eq!(s3.h(2), Ok(BigInt::from(3)));
        assert_eq!(s3.h(5), Ok(BigInt::from(12)));
        let s2 = PadicSpec::all_ones(2).unwrap();
        assert_eq!(build_sequence(&s2, 2).unwrap(), ints(&[2, 6]));
        let s7 = PadicSpec::new(7, DigitRule::Periodic(vec![1, 0, 3])).unwrap();
        assert_eq!(build_sequence(&s7, 1).unwrap(), ints(&[7]));
        assert_eq!(s7.h(6), Ok(BigInt::from(7 + 3 * 343)));
    }

    #[test]
    fn spec_validation() {
        assert!(PadicSpec::all_ones(4).is_err());
        assert!(PadicSpec::new(3, DigitRule::Periodic(vec![2, 1])).is_err());
        assert!(PadicSpec::new(3, DigitRule::Periodic(vec![1, 3])).is_err());
        assert!(PadicSpec::new(3, DigitRule::Custom { digits: vec![1, 2], certificate: " ".into() }).is_err());
        let c = PadicSpec::new(3, DigitRule::Custom { digits: vec![1, 2], certificate: "digits of 1/2".into() }).unwrap();
        assert_eq!(c.digit(3), Err(Error::ExhaustedSource(3)));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(90), 3), Some(2));
        assert_eq!(valuation(&BigInt::from(-8), 2), Some(3));
        assert_eq!(valuation(&BigInt::zero(), 5), None);
        let x = PadicInt::from_integer(&BigInt::from(93), 3, 6);
        assert_eq!(x.digits, vec![0, 1, 1, 0, 1, 0]);
        assert_eq!(x.to_integer(), BigInt::from(93));
        assert_eq!(PadicInt::from_integer(&BigInt::from(-1), 3, 3).digits, vec![2, 2, 2]);
    }

    #[test]
    fn limit_check_all_ones() {
        let rep = padic_limit_check(&PadicSpec::all_ones(3).unwrap(), 12).unwrap();
        assert!(rep.cauchy && rep.even_strictly_increasing && rep.nonzero_beyond_every_index);
        assert_eq!(rep.even_valuations[..3], [(2, Some(2)), (4, Some(4)), (6, Some(6))]);
        assert_eq!(rep.table[1].difference, BigInt::from(18));
        let trivial = padic_limit_check(&PadicSpec::all_ones(2).unwrap(), 1).unwrap();
        assert_eq!(trivial.table.len(), 1);
    }

    #[test]
    fn convergence_set_p3() {
        let s = PadicSpec::all_ones(3).unwrap();
        let rep = circle_convergence_set(&s, 3, 20, &[Rational::new(1.into(), 2.into())]).unwrap();
        let expected: BTreeSet<Rational> =
            [0, 1, 2].iter().map(|&a| Rational::new(BigInt::from(a), BigInt::from(3))).collect();
        assert_eq!(rep.converge0, expected);
        assert!(rep.converge0_is_subgroup && rep.difference_identity);
        assert!(rep.probes.iter().all(|p| p.identity_holds && p.checked > 0));
        let ninth = rep.probes.iter().find(|p| p.l == 2 && p.a == 1).unwrap();
        assert_eq!(ninth.constant, Rational::new(1.into(), 3.into()));
        assert_eq!(ninth.verdict, PadicVerdict::Diverge);
        assert_eq!(rep.extra[0].tail_max, Rational::new(1.into(), 2.into()));
    }
}
