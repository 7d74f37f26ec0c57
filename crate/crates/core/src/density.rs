//! Density-raising and gap-forcing transforms of characterizing sequences,
//! and quotient statistics.

use std::collections::BTreeSet;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::characterize::{ser_rational, GroupSpec};
use crate::circle::{NormOrdering, Precision, PreparedElement, Rational, Threshold};
use crate::error::{Error, Result};
use crate::sequence::{CharSequence, Provenance};

/// Cut points `0 = i₀ < i₁ < …` with interval densities `ε₀ ≥ ε₁ ≥ …`.
/// Interval j is `I_j = [i_j, i_{j+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition {
    cuts: Vec<i64>,
    densities: Vec<Rational>,
}

impl IntervalPartition {
    pub fn new(cuts: Vec<i64>, densities: Vec<Rational>) -> Result<Self> {
        if cuts.first() != Some(&0) {
            return Err(Error::Invalid("partition must start at 0".into()));
        }
        if cuts.len() < 2 || densities.len() != cuts.len() - 1 {
            return Err(Error::Invalid("need one density per interval".into()));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("cut points must increase strictly".into()));
        }
        if densities.iter().any(|e| e.is_negative() || *e > Rational::one()) {
            return Err(Error::Invalid("densities must lie in [0, 1]".into()));
        }
        if let Some(j) = densities.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Invalid(format!("densities must not increase (interval {})", j + 1)));
        }
        Ok(IntervalPartition { cuts, densities })
    }

    /// `i_j = j²` for `j ≤ intervals`, with `ε_j = 1/(j + offset)`.
    pub fn squares(intervals: usize, offset: i64) -> Result<Self> {
        let cuts = (0..=intervals as i64 + 1).map(|j| j * j).collect();
        let densities = (0..=intervals as i64).map(|j| Rational::new(1.into(), (j + offset).into())).collect();
        Self::new(cuts, densities)
    }

    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    /// `[start, end)` of interval j.
    pub fn interval(&self, j: usize) -> (i64, i64) {
        (self.cuts[j], self.cuts[j + 1])
    }

    pub fn density(&self, j: usize) -> &Rational {
        &self.densities[j]
    }

    /// `⌈ε_j |I_j|⌉`.
    pub fn required(&self, j: usize) -> i64 {
        let (a, b) = self.interval(j);
        (self.density(j) * Rational::from_integer((b - a).into())).ceil().to_integer().try_into().unwrap()
    }

    pub fn end(&self) -> i64 {
        *self.cuts.last().unwrap()
    }
}

/// `{k ∈ [start, end) : ‖kαᵢ‖ < 1/t for i ≤ t}`; level 0 is the whole interval.
pub fn level_set(g: &GroupSpec, interval: (i64, i64), t: usize) -> Result<Vec<i64>> {
    let all: Vec<i64> = (interval.0..interval.1).collect();
    refine_level(g, all, t)
}

/// Filters `candidates` (already in level t − 1) down to level t.
fn refine_level(g: &GroupSpec, candidates: Vec<i64>, t: usize) -> Result<Vec<i64>> {
    if t <= 1 {
        // ‖x‖ < 1 always holds
        return Ok(candidates);
    }
    let threshold = Threshold::new(Rational::new(1.into(), (t as i64).into()));
    let alphas: Vec<PreparedElement> = g.prefix(t).into_iter().map(PreparedElement::new).collect();
    let mut out = Vec::new();
    'k: for k in candidates {
        for a in &alphas {
            match a.order_norm(k, &threshold, Precision::default())? {
                NormOrdering::Less => {}
                NormOrdering::Equal | NormOrdering::Greater => continue 'k,
                NormOrdering::Undecidable => return Err(Error::UndecidableMembership(k)),
            }
        }
        out.push(k);
    }
    Ok(out)
}

/// The level chosen for one interval.
#[derive(Debug, Clone, Serialize)]
pub struct ThickLevel {
    pub interval: usize,
    pub start: i64,
    pub end: i64,
    pub level: usize,
    pub required: i64,
    pub selected: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThickPlan {
    pub levels: Vec<ThickLevel>,
}

impl ThickPlan {
    pub fn level_curve(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.level).collect()
    }
}

/// Union of `c` with, for each interval j, the deepest level set
/// `I_j⁺(t_j)`, `t_j ≤ j`, still holding at least `ε_j |I_j|` integers.
pub fn thicken(c: &CharSequence, p: &IntervalPartition, g: &GroupSpec) -> Result<(CharSequence, ThickPlan)> {
    let mut levels = Vec::with_capacity(p.len());
    let mut tagged: Vec<(i64, Provenance)> = c.iter().collect();
    for j in 0..p.len() {
        let (start, end) = p.interval(j);
        let need = p.density(j) * Rational::from_integer((end - start).into());
        let mut chosen = (start..end).collect::<Vec<i64>>();
        let mut level = 0;
        for t in 1..=j {
            let next = refine_level(g, chosen.clone(), t)?;
            if Rational::from_integer((next.len() as i64).into()) < need {
                break;
            }
            chosen = next;
            level = t;
        }
        tagged.extend(chosen.iter().map(|&k| (k, Provenance::Level { interval: j })));
        levels.push(ThickLevel { interval: j, start, end, level, required: p.required(j), selected: chosen });
    }
    Ok((CharSequence::from_tagged(tagged)?, ThickPlan { levels }))
}

/// Interleaves `c` with shifted copies: `k_{2n} = c_{j_n}`,
/// `k_{2n+1} = c_{j_n} + c_n`, with `j_n` minimal such that
/// `k_{2n} > max(m_{2n}, k_{2n−1})` and `k_{2n+1} > m_{2n+1}`.
///
/// `m[i]` is `m_{i+1}`. Pairs are produced for every n with `2n ≤ m.len()`;
/// a missing `m_{2n+1}` imposes no bound. Output indices start at 2.
pub fn thin(c: &CharSequence, m: &[i64]) -> Result<CharSequence> {
    if m.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("bound sequence must increase strictly".into()));
    }
    let c = c.terms();
    if c.first().is_some_and(|&x| x <= 0) {
        return Err(Error::Invalid("base sequence must be positive".into()));
    }
    let pairs = m.len() / 2;
    let bound = |i: usize| m.get(i - 1).copied();
    let mut terms = Vec::with_capacity(2 * pairs);
    let mut prov = Vec::with_capacity(2 * pairs);
    let mut prev: Option<i64> = None;
    let mut j = 0usize;
    for n in 1..=pairs {
        let cn = *c.get(n - 1).ok_or(Error::ExhaustedSource(2 * n + 1))?;
        let lower_even = bound(2 * n).unwrap().max(prev.unwrap_or(i64::MIN));
        let lower_odd = bound(2 * n + 1);
        loop {
            let cj = *c.get(j).ok_or(Error::ExhaustedSource(2 * n))?;
            if cj > lower_even && lower_odd.is_none_or(|b| cj + cn > b) {
                break;
            }
            j += 1;
        }
        let even = c[j];
        let odd = even.checked_add(cn).ok_or_else(|| Error::Invalid("term overflow".into()))?;
        terms.extend([even, odd]);
        prov.extend([Provenance::Paired { pair: n, odd: false }, Provenance::Paired { pair: n, odd: true }]);
        prev = Some(odd);
        j += 1;
    }
    CharSequence::new(terms, prov)
}

/// Counts of one partition interval.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalCount {
    pub interval: usize,
    pub size: i64,
    pub count: i64,
    pub required: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientStats {
    #[serde(serialize_with = "ser_opt")]
    pub max_quotient: Option<Rational>,
    #[serde(serialize_with = "ser_opt")]
    pub tail_max_quotient: Option<Rational>,
    pub tail_window: usize,
    pub per_interval: Vec<IntervalCount>,
}

fn ser_opt<S: serde::Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_rational(q, s),
        None => s.serialize_none(),
    }
}

/// Quotients `k_{n+1}/k_n` (zero denominators skipped).
pub fn quotients(seq: &[i64]) -> Vec<Rational> {
    seq.windows(2)
        .filter(|w| w[0] != 0)
        .map(|w| Rational::new(w[1].into(), w[0].into()))
        .collect()
}

/// Exact quotient and density statistics of a finite prefix.
pub fn quotient_stats(seq: &[i64], tail_window: usize, partition: Option<&IntervalPartition>) -> Result<QuotientStats> {
    if seq.len() < 2 {
        return Err(Error::Invalid("need at least two terms".into()));
    }
    let q = quotients(seq);
    let tail_start = seq.len().saturating_sub(tail_window.max(2));
    let tq = quotients(&seq[tail_start..]);
    let per_interval = partition
        .map(|p| {
            let set: BTreeSet<i64> = seq.iter().copied().collect();
            (0..p.len())
                .map(|j| {
                    let (a, b) = p.interval(j);
                    IntervalCount { interval: j, size: b - a, count: set.range(a..b).count() as i64, required: p.required(j) }
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(QuotientStats {
        max_quotient: q.into_iter().max(),
        tail_max_quotient: tq.into_iter().max(),
        tail_window: seq.len() - tail_start,
        per_interval,
    })
}

/// Largest `n` so that every interval up to `n` is fully covered by `end`.
pub fn covered_intervals(p: &IntervalPartition, end: i64) -> usize {
    (0..p.len()).take_while(|&j| p.interval(j).1 <= end).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleElement;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn level_sets() {
        let g = GroupSpec::generated_by(vec![CircleElement::ratio(1, 2)]).unwrap();
        assert_eq!(level_set(&g, (1, 11), 2).unwrap(), vec![2, 4, 6, 8, 10]);
        assert_eq!(level_set(&g, (1, 11), 0).unwrap(), (1..11).collect::<Vec<_>>());
    }

    #[test]
    fn partition_validation() {
        assert!(IntervalPartition::new(vec![0, 2, 5], vec![r(1, 2), r(1, 3)]).is_ok());
        assert!(IntervalPartition::new(vec![0, 2, 5], vec![r(1, 3), r(1, 2)]).is_err());
        assert!(IntervalPartition::new(vec![1, 2], vec![r(1, 3)]).is_err());
        let p = IntervalPartition::squares(3, 2).unwrap();
        assert_eq!(p.interval(2), (4, 9));
        assert_eq!(p.required(2), 2);
    }

    #[test]
    fn thicken_full_density() {
        let g = GroupSpec::generated_by(vec![CircleElement::ratio(1, 3)]).unwrap();
        let p = IntervalPartition::new(vec![0, 4, 10], vec![r(1, 1), r(1, 1)]).unwrap();
        let c = CharSequence::external(vec![3, 30]).unwrap();
        let (out, plan) = thicken(&c, &p, &g).unwrap();
        assert_eq!(out.terms(), &(0..10).chain([30]).collect::<Vec<_>>()[..]);
        assert!(plan.levels.iter().all(|l| l.selected.len() as i64 == l.end - l.start));
    }

    #[test]
    fn thin_multiples_of_five() {
        let c = CharSequence::external((1..=400).map(|j| 5 * j).collect()).unwrap();
        let m: Vec<i64> = (1..=10).map(|n| 1i64 << n).collect();
        let out = thin(&c, &m).unwrap();
        let k = out.terms();
        for (i, &x) in k.iter().enumerate() {
            let idx = i + 2;
            if idx <= m.len() {
                assert!(m[idx - 1] < x);
            }
        }
        for n in 1..=k.len() / 2 {
            assert_eq!(k[2 * n - 1] - k[2 * n - 2], 5 * n as i64);
        }
        let short = CharSequence::external(vec![5, 10]).unwrap();
        assert!(matches!(thin(&short, &m), Err(Error::ExhaustedSource(_))));
    }

    #[test]
    fn quotient_examples() {
        let s = quotient_stats(&[5, 10, 15, 20], 4, None).unwrap();
        assert_eq!(quotients(&[5, 10, 15, 20]), vec![r(2, 1), r(3, 2), r(4, 3)]);
        assert_eq!(s.max_quotient, Some(r(2, 1)));
        assert!(quotients(&[1, 2, 4, 8]).iter().all(|q| *q == r(2, 1)));
        assert_eq!(quotients(&[0, 2, 4]), vec![r(2, 1)]);
    }
}
