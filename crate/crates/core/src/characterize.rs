//! Construction of characterizing sequences for countable subgroups of 𝕋.
//!
//! Stage t works with the first t enumerated elements of H and a bound M_t.
//! It surrounds the finite ball R_t = ⟨α₁…α_t⟩_{M_t} with arcs of radius
//! d_t, then greedily picks a finite set E_t of Bohr characters (avoiding
//! earlier stages) whose constraint set lies inside those arcs. The union of
//! the E_t is the characterizing sequence. M_t doubles until separation
//! succeeds, and a stage is rebuilt with a smaller radius whenever a later
//! ball comes too close to it.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bohr::{self, first_bohr_above, one_half, one_third, BohrParams, KroneckerTarget, TargetArc};
use crate::circle::{
    check_sigma, decimal_string, ArcSet, CircleElement, NormOrdering, Precision, PreparedElement, Rational,
    Threshold,
};
use crate::error::{Error, Result};
use crate::lattice::{order_modulo, RelationLattice};
use crate::sequence::{CharSequence, Provenance};

/// An enumerated countable subgroup H = {α₁, α₂, …} of 𝕋.
///
/// Either the enumeration is given explicitly, or H is the subgroup
/// generated by finitely many elements and is enumerated by growing
/// coefficient shells, skipping 0, repeats and negatives of earlier
/// elements (negation does not change any norm ‖kα‖).
#[derive(Debug)]
pub struct GroupSpec {
    generators: Vec<CircleElement>,
    generated: bool,
    state: Mutex<Enumeration>,
}

#[derive(Debug, Clone)]
struct Enumeration {
    listed: Vec<CircleElement>,
    seen: BTreeSet<CircleElement>,
    next_shell: u64,
    /// Group order when finite.
    order: Option<BigInt>,
    exhausted: bool,
}

impl Clone for GroupSpec {
    fn clone(&self) -> Self {
        GroupSpec {
            generators: self.generators.clone(),
            generated: self.generated,
            state: Mutex::new(self.state.lock().unwrap().clone()),
        }
    }
}

impl GroupSpec {
    /// The subgroup generated by `generators`.
    pub fn generated_by(generators: Vec<CircleElement>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Invalid("group needs at least one generator".into()));
        }
        let lattice = RelationLattice::of(&generators);
        let order = lattice.is_full_rank().then(|| lattice_index(&lattice));
        let state = Enumeration {
            listed: Vec::new(),
            seen: BTreeSet::from([CircleElement::zero()]),
            next_shell: 1,
            exhausted: order.as_ref().is_some_and(|o| o.is_one()),
            order,
        };
        Ok(GroupSpec { generators, generated: true, state: Mutex::new(state) })
    }

    /// An explicit enumeration; the listed elements are taken as given
    /// (zero and repeats are dropped).
    pub fn from_list(elements: Vec<CircleElement>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let listed: Vec<CircleElement> =
            elements.iter().filter(|e| !e.is_zero() && seen.insert((*e).clone())).cloned().collect();
        let generators = if listed.is_empty() { vec![CircleElement::zero()] } else { listed.clone() };
        let state = Enumeration { listed, seen, next_shell: 0, order: None, exhausted: true };
        Ok(GroupSpec { generators, generated: false, state: Mutex::new(state) })
    }

    pub fn generators(&self) -> &[CircleElement] {
        &self.generators
    }

    /// Whether every element of H is known to be enumerated.
    pub fn is_exhausted(&self) -> bool {
        self.state.lock().unwrap().exhausted
    }

    /// Up to `t` enumerated elements (fewer if H is finite and exhausted).
    /// The trivial group is represented by the single element 0.
    pub fn prefix(&self, t: usize) -> Vec<CircleElement> {
        let mut st = self.state.lock().unwrap();
        while st.listed.len() < t && !st.exhausted {
            self.extend_shell(&mut st);
        }
        if st.listed.is_empty() {
            return vec![CircleElement::zero()];
        }
        st.listed.iter().take(t).cloned().collect()
    }

    /// Number of enumerated elements available for a stage needing `t`.
    pub fn available(&self, t: usize) -> usize {
        self.prefix(t).len()
    }

    pub fn relation_lattice(&self, t: usize) -> RelationLattice {
        RelationLattice::of(&self.prefix(t))
    }

    /// ⟨α₁…α_t⟩_M.
    pub fn ball(&self, t: usize, m: u64) -> BTreeSet<CircleElement> {
        group_ball(&self.prefix(t), m)
    }

    fn extend_shell(&self, st: &mut Enumeration) {
        let s = st.next_shell as i64;
        st.next_shell += 1;
        let n = self.generators.len();
        let mut coeffs = vec![-s; n];
        loop {
            let max = coeffs.iter().map(|c| c.abs()).max().unwrap_or(0);
            let first = coeffs.iter().find(|c| **c != 0).copied().unwrap_or(0);
            if max == s && first > 0 {
                let x = self
                    .generators
                    .iter()
                    .zip(&coeffs)
                    .fold(CircleElement::zero(), |acc, (g, &c)| &acc + &g.mul_int(c));
                let neg = -&x;
                if !st.seen.contains(&x) {
                    st.seen.insert(x.clone());
                    st.seen.insert(neg);
                    st.listed.push(x);
                }
            }
            // odometer over [-s, s]^n
            let mut i = n;
            loop {
                if i == 0 {
                    if let Some(order) = &st.order {
                        if BigInt::from(st.seen.len()) >= *order {
                            st.exhausted = true;
                        }
                    }
                    return;
                }
                i -= 1;
                if coeffs[i] < s {
                    coeffs[i] += 1;
                    break;
                }
                coeffs[i] = -s;
            }
        }
    }
}

/// Index of a full-rank lattice in ℤ^t (product of Hermite pivots).
fn lattice_index(l: &RelationLattice) -> BigInt {
    l.basis
        .iter()
        .map(|row| row.iter().find(|x| !x.is_zero()).cloned().unwrap_or_default())
        .product()
}

/// `{Σ kᵢαᵢ : |kᵢ| ≤ M}` deduplicated by canonical form.
pub fn group_ball(elements: &[CircleElement], m: u64) -> BTreeSet<CircleElement> {
    let mut ball = BTreeSet::from([CircleElement::zero()]);
    for g in elements {
        let multiples: Vec<CircleElement> = (-(m as i64)..=m as i64).map(|j| g.mul_int(j)).collect();
        let mut next = BTreeSet::new();
        for x in &ball {
            for y in &multiples {
                next.insert(x + y);
            }
        }
        ball = next;
    }
    ball
}

/// Certified positions of a finite set of points, sorted around the circle.
#[derive(Debug, Clone)]
pub struct PointLayout {
    /// `(lo, hi, label)` with `0 ≤ lo`, sorted by `lo`.
    points: Vec<(Rational, Rational, bool)>,
}

impl PointLayout {
    /// Encloses every point to at least `bits` bits and refines until
    /// neighbouring enclosures are disjoint. `labels` marks points of a
    /// previously built ball.
    pub fn new(points: &[(CircleElement, bool)], bits: u32, cap: u32) -> Result<Self> {
        let mut bits = bits.max(16);
        loop {
            let mut placed = Vec::with_capacity(points.len());
            for (p, label) in points {
                let enc = p.enclose(bits)?;
                let lo = enc.lo_rational();
                let shift = lo.floor();
                placed.push((lo - &shift, enc.hi_rational() - shift, *label));
            }
            placed.sort_by(|a, b| a.0.cmp(&b.0));
            let clash = Self::clash(&placed);
            match clash {
                None => return Ok(PointLayout { points: placed }),
                Some(i) if bits >= cap => {
                    let j = (i + 1) % points.len();
                    return Err(Error::DegenerateSpacing(
                        decimal_string(&placed[i].0, 12, false),
                        decimal_string(&placed[j].0, 12, false),
                    ));
                }
                Some(_) => bits = (bits * 2).min(cap),
            }
        }
    }

    fn clash(placed: &[(Rational, Rational, bool)]) -> Option<usize> {
        let n = placed.len();
        if n == 1 {
            return (placed[0].1 >= &placed[0].0 + Rational::one()).then_some(0);
        }
        (0..n).find(|&i| {
            let next_lo = if i + 1 < n { placed[i + 1].0.clone() } else { &placed[0].0 + Rational::one() };
            placed[i].1 >= next_lo
        })
    }

    fn gaps(&self) -> impl Iterator<Item = (Rational, bool)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| {
            let (next_lo, next_label) = if i + 1 < n {
                (self.points[i + 1].0.clone(), self.points[i + 1].2)
            } else {
                (&self.points[0].0 + Rational::one(), self.points[0].2)
            };
            (next_lo - &self.points[i].1, next_label != self.points[i].2)
        })
    }

    /// Certified lower bound on the least distance between distinct points
    /// (1 for a single point).
    pub fn spacing(&self) -> Rational {
        if self.points.len() == 1 {
            return Rational::one();
        }
        self.gaps().map(|(g, _)| g).min().unwrap()
    }

    /// Certified lower bound on the least distance between a labelled and an
    /// unlabelled point, if both kinds occur.
    pub fn cross_gap(&self) -> Option<Rational> {
        self.gaps().filter(|(_, cross)| *cross).map(|(g, _)| g).min()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Largest `2^-j` with `d · 65/64 < bound`.
pub fn dyadic_radius_below(bound: &Rational) -> Rational {
    let slack = Rational::new(65.into(), 64.into());
    let mut d = Rational::new(1.into(), 4.into());
    while &d * &slack >= *bound {
        d /= Rational::from_integer(2.into());
    }
    d
}

/// The union of closed arcs of radius `d` around the points, widened by at
/// most `d/64` to absorb enclosure width.
pub fn neighborhood(points: &BTreeSet<CircleElement>, d: &Rational) -> Result<ArcSet> {
    let mut bits = 8;
    while Rational::new(BigInt::one(), BigInt::one() << bits) * Rational::from_integer(64.into()) > *d {
        bits += 1;
    }
    let mut arcs = Vec::with_capacity(points.len());
    for p in points {
        let enc = p.enclose(bits)?;
        arcs.push((enc.lo_rational() - d, enc.hi_rational() + d));
    }
    Ok(ArcSet::from_arcs(arcs))
}

/// One construction stage.
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Number of enumerated elements of H in use.
    pub generators: usize,
    pub m: u64,
    pub ball_size: usize,
    #[serde(serialize_with = "ser_rational")]
    pub radius: Rational,
    #[serde(skip)]
    pub ball: BTreeSet<CircleElement>,
    #[serde(skip)]
    pub neighborhood: ArcSet,
    /// Greedy separating set E_t.
    pub characters: BTreeSet<i64>,
    /// Extra Bohr members placed above prescribed floors.
    pub padding: BTreeSet<i64>,
    #[serde(skip)]
    pub constraint: ArcSet,
    pub scanned: u64,
    pub restarts: u32,
}

pub(crate) fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Tunables of the construction.
#[derive(Debug, Clone)]
pub struct CharacterizeOptions {
    pub sigma: Rational,
    pub stages: usize,
    /// Candidate characters examined per separation attempt.
    pub budget: u64,
    /// Largest M tried before giving up on a stage.
    pub max_m: u64,
    pub precision_cap: u32,
}

impl CharacterizeOptions {
    pub fn new(sigma: Rational, stages: usize) -> Self {
        CharacterizeOptions { sigma, stages, budget: 1_000_000, max_m: 64, precision_cap: Precision::DEFAULT_CAP }
    }
}

/// State of a characterization run: the group and every completed stage.
#[derive(Debug, Clone)]
pub struct Characterization {
    pub group: GroupSpec,
    pub options: CharacterizeOptions,
    pub stages: Vec<StageRecord>,
}

impl Characterization {
    pub fn new(group: GroupSpec, options: CharacterizeOptions) -> Result<Self> {
        check_sigma(&options.sigma, &one_third())?;
        if options.budget == 0 || options.max_m == 0 {
            return Err(Error::Invalid("budgets must be positive".into()));
        }
        Ok(Characterization { group, options, stages: Vec::new() })
    }

    /// Runs all configured stages.
    pub fn run(group: GroupSpec, options: CharacterizeOptions) -> Result<Self> {
        let stages = options.stages;
        let mut c = Self::new(group, options)?;
        for _ in 0..stages {
            c.push_stage(&[])?;
        }
        Ok(c)
    }

    fn excluded_before(&self, stage: usize) -> BTreeSet<i64> {
        self.stages[..stage - 1].iter().flat_map(|s| s.characters.iter().chain(&s.padding).copied()).collect()
    }

    fn params(&self, stage: usize, generators: &[CircleElement]) -> Result<BohrParams> {
        Ok(BohrParams::new(generators.to_vec(), self.options.sigma.clone())?.excluding(self.excluded_before(stage)))
    }

    /// Builds stage `stage` (1-based) from a ball and radius.
    fn build(&self, stage: usize, m: u64, ball: BTreeSet<CircleElement>, radius: Rational) -> Result<StageRecord> {
        let t = self.group.available(stage);
        let gens = self.group.prefix(stage);
        let params = self.params(stage, &gens)?;
        let v = neighborhood(&ball, &radius)?;
        let sep = bohr::separate(&params, &self.options.sigma, &v, self.options.budget)
            .map_err(|e| with_stage(e, stage))?;
        Ok(StageRecord {
            stage,
            generators: t,
            m,
            ball_size: ball.len(),
            radius,
            ball,
            neighborhood: v,
            characters: sep.characters,
            padding: BTreeSet::new(),
            constraint: sep.constraint,
            scanned: sep.scanned,
            restarts: 0,
        })
    }

    /// Appends the next stage. For each floor f the smallest Bohr member of
    /// the stage above f (outside earlier stages) is added as padding.
    pub fn push_stage(&mut self, floors: &[i64]) -> Result<&StageRecord> {
        let stage = self.stages.len() + 1;
        let t = self.group.available(stage);
        let prev = self.stages.last().cloned();
        let mut m = prev.as_ref().map_or(1, |p| p.m);
        let mut last_ball: Option<BTreeSet<CircleElement>> = None;
        let record = loop {
            let ball = self.group.ball(t, m);
            let prev_ball = prev.as_ref().map(|p| p.ball.clone()).unwrap_or_default();
            let labelled: Vec<(CircleElement, bool)> =
                ball.iter().map(|x| (x.clone(), prev_ball.contains(x))).collect();
            let layout = PointLayout::new(&labelled, 64, self.options.precision_cap)?;
            let half = one_half();
            let mut bound = layout.spacing() * &half;
            if let Some(gap) = layout.cross_gap() {
                let gap_half = gap * &half;
                // the previous stage must also sit inside half the gap
                if let Some(p) = self.stages.last() {
                    let slack = Rational::new(65.into(), 64.into());
                    if &p.radius * &slack >= gap_half {
                        let idx = p.stage;
                        let new_radius = dyadic_radius_below(&gap_half.clone().min(p.radius.clone()));
                        let mut rebuilt = self.build(idx, p.m, p.ball.clone(), new_radius)?;
                        rebuilt.restarts = p.restarts + 1;
                        self.stages[idx - 1] = rebuilt;
                    }
                }
                bound = bound.min(gap_half);
            }
            if let Some(p) = self.stages.last() {
                bound = bound.min(p.radius.clone());
            }
            let radius = dyadic_radius_below(&bound);
            match self.build(stage, m, ball.clone(), radius) {
                Ok(r) => break r,
                Err(Error::BudgetExceeded { .. }) if m * 2 <= self.options.max_m && last_ball.as_ref() != Some(&ball) => {
                    last_ball = Some(ball);
                    m *= 2;
                }
                Err(e) => return Err(e),
            }
        };
        self.stages.push(record);
        if !floors.is_empty() {
            self.pad_last(floors)?;
        }
        Ok(self.stages.last().unwrap())
    }

    fn pad_last(&mut self, floors: &[i64]) -> Result<()> {
        let stage = self.stages.len();
        let gens = self.group.prefix(stage);
        let mut params = self.params(stage, &gens)?;
        let rec = &self.stages[stage - 1];
        params.excluded.extend(rec.characters.iter().copied());
        let mut padding = BTreeSet::new();
        for &f in floors {
            let k = first_bohr_above(&params, f, self.options.budget)?
                .ok_or(Error::BudgetExceeded { budget: self.options.budget, stage: Some(stage) })?;
            padding.insert(k);
        }
        self.stages[stage - 1].padding = padding;
        Ok(())
    }

    /// Terms of all stages, increasing.
    pub fn sequence(&self) -> CharSequence {
        CharSequence::from_tagged(self.tagged().collect()).expect("stages are disjoint and positive")
    }

    fn tagged(&self) -> impl Iterator<Item = (i64, Provenance)> + '_ {
        self.stages.iter().flat_map(|s| {
            s.characters
                .iter()
                .map(move |&k| (k, Provenance::Stage { stage: s.stage }))
                .chain(s.padding.iter().map(move |&k| (k, Provenance::Padding { stage: s.stage })))
        })
    }

    /// Terms listed stage by stage, each stage increasing.
    pub fn stage_order(&self) -> Vec<i64> {
        self.stages.iter().flat_map(|s| {
            let mut all: Vec<i64> = s.characters.iter().chain(&s.padding).copied().collect();
            all.sort_unstable();
            all
        }).collect()
    }

    /// Re-checks every stage: pairwise disjoint E_t, exact containment of
    /// the constraint set in V_t, and E_t inside its Bohr set.
    pub fn certify(&self) -> Result<bool> {
        let mut seen = BTreeSet::new();
        for s in &self.stages {
            for k in s.characters.iter().chain(&s.padding) {
                if !seen.insert(*k) {
                    return Ok(false);
                }
            }
            let c = bohr::constraint_set(&s.characters, &self.options.sigma)?;
            if c != s.constraint || !s.neighborhood.contains(&c) {
                return Ok(false);
            }
            let tester = BohrParams::new(self.group.prefix(s.stage), self.options.sigma.clone())?.tester();
            for &k in s.characters.iter().chain(&s.padding) {
                if !tester.contains(k)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn with_stage(e: Error, stage: usize) -> Error {
    match e {
        Error::BudgetExceeded { budget, .. } => Error::BudgetExceeded { budget, stage: Some(stage) },
        other => other,
    }
}

/// Convenience wrapper: run `stages` stages with default budgets.
pub fn characterize(g: GroupSpec, sigma: Rational, stages: usize) -> Result<Characterization> {
    Characterization::run(g, CharacterizeOptions::new(sigma, stages))
}

/// The bound M used at stage `t`.
pub fn adaptive_m(g: GroupSpec, t: usize, sigma: Rational, budget: u64) -> Result<u64> {
    let mut opts = CharacterizeOptions::new(sigma, t);
    opts.budget = budget;
    Ok(Characterization::run(g, opts)?.stages[t - 1].m)
}

/// Target value used for β ∉ H: 1/2 if no multiple of β lies in H,
/// otherwise the smallest j/e (e the order of β modulo H) with ‖j/e‖ ≥ 1/3.
pub fn complement_target(generators: &[CircleElement], beta: &CircleElement) -> Result<CircleElement> {
    let e = order_modulo(generators, beta);
    if e.is_one() {
        return Err(Error::NotInComplement(beta.to_string()));
    }
    if e.is_zero() {
        return Ok(CircleElement::ratio(1, 2));
    }
    let e = e.to_i64().ok_or_else(|| Error::Invalid("order too large".into()))?;
    let third = one_third();
    let j = (1..e)
        .find(|&j| crate::circle::rational_norm(&Rational::new(j.into(), e.into())) >= third)
        .expect("some j/e has norm ≥ 1/3 for e ≥ 2");
    Ok(CircleElement::ratio(j, e))
}

/// Characters χ₁ < χ₂ < … with ‖χₙαᵢ‖ < 1/n for the first n enumerated
/// αᵢ and ‖χₙβ − c‖ < 1/n, where c is [`complement_target`].
pub fn g_closed_witness(g: &GroupSpec, beta: &CircleElement, n: usize, search_bound: u64) -> Result<(CircleElement, CharSequence)> {
    let target = complement_target(g.generators(), beta)?;
    let mut terms = Vec::with_capacity(n);
    let mut prev = 0i64;
    for i in 1..=n {
        let radius = Rational::new(BigInt::one(), BigInt::from(i));
        let alphas = g.prefix(i);
        let mut pairs: Vec<(CircleElement, TargetArc)> = alphas
            .iter()
            .map(|a| Ok((a.clone(), TargetArc::new(CircleElement::zero(), radius.clone())?)))
            .collect::<Result<_>>()?;
        pairs.push((beta.clone(), TargetArc::new(target.clone(), radius.clone())?));
        let mut all = alphas.clone();
        all.push(beta.clone());
        let lattice = RelationLattice::of(&all);
        let kt = KroneckerTarget { pairs };
        match bohr::kronecker_solve_from(&kt, &lattice, prev + 1, search_bound)? {
            bohr::KroneckerOutcome::Found(k) => {
                terms.push(k);
                prev = k;
            }
            bohr::KroneckerOutcome::NotFound { bound, .. } => return Err(Error::NotFound { bound }),
        }
    }
    let prov = (1..=n).map(|i| Provenance::Witness { n: i }).collect();
    Ok((target, CharSequence::new(terms, prov)?))
}

/// What a probe is expected to do along the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expectation {
    Converge0,
    Diverge,
}

/// Sup of certified upper bounds of ‖kβ‖ over one block.
#[derive(Debug, Clone, Serialize)]
pub struct BlockSup {
    pub first: i64,
    pub last: i64,
    #[serde(serialize_with = "ser_rational_up")]
    pub sup: Rational,
}

/// A block term with certified ‖kβ‖ ≥ σ.
#[derive(Debug, Clone, Serialize)]
pub struct BlockWitness {
    pub first: i64,
    pub last: i64,
    pub witness: Option<i64>,
    #[serde(serialize_with = "ser_opt_rational_down")]
    pub norm_lower: Option<Rational>,
}

pub(crate) fn ser_rational_up<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&decimal_string(q, 20, true))
}

pub(crate) fn ser_opt_rational_down<S: serde::Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&decimal_string(q, 20, false)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "expected")]
pub enum ProbeReport {
    Converge0 {
        probe: String,
        #[serde(serialize_with = "ser_rational_up")]
        sup: Rational,
        blocks: Vec<BlockSup>,
        /// Block sups never increase along the tail.
        non_increasing: bool,
    },
    Diverge {
        probe: String,
        blocks: Vec<BlockWitness>,
        every_block_witnessed: bool,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tail_start: usize,
    pub tail_len: usize,
    pub block: usize,
    #[serde(serialize_with = "ser_rational")]
    pub sigma: Rational,
    pub probes: Vec<ProbeReport>,
    pub note: &'static str,
}

/// Checks probes on the last `tail_window` terms, cut into blocks of
/// `block` consecutive terms (a short final block is merged into its
/// predecessor). Bounds over a finite prefix can refute a limit but never
/// prove one.
pub fn verify(
    seq: &[i64],
    probes: &[(CircleElement, Expectation)],
    sigma: &Rational,
    tail_window: usize,
    block: usize,
) -> Result<VerifyReport> {
    if seq.is_empty() {
        return Err(Error::Invalid("cannot verify an empty sequence".into()));
    }
    let tail_len = tail_window.min(seq.len()).max(1);
    let tail_start = seq.len() - tail_len;
    let tail = &seq[tail_start..];
    let block = block.max(1);
    let mut chunks: Vec<&[i64]> = tail.chunks(block).collect();
    if chunks.len() > 1 && chunks.last().unwrap().len() < block {
        let last = chunks.pop().unwrap();
        let prev = chunks.pop().unwrap();
        let start = tail.len() - last.len() - prev.len();
        chunks.push(&tail[start..]);
    }
    let threshold = Threshold::new(sigma.clone());
    let precision = Precision::default();
    let mut reports = Vec::new();
    for (beta, exp) in probes {
        let prepared = PreparedElement::new(beta.clone());
        match exp {
            Expectation::Converge0 => {
                let mut blocks = Vec::new();
                for c in &chunks {
                    let mut sup = Rational::zero();
                    for &k in *c {
                        let b = prepared.norm(k, 96)?;
                        if b.hi > sup {
                            sup = b.hi;
                        }
                    }
                    blocks.push(BlockSup { first: c[0], last: *c.last().unwrap(), sup });
                }
                let sup = blocks.iter().map(|b| b.sup.clone()).max().unwrap_or_default();
                let non_increasing = blocks.windows(2).all(|w| w[1].sup <= w[0].sup);
                reports.push(ProbeReport::Converge0 { probe: beta.to_string(), sup, blocks, non_increasing });
            }
            Expectation::Diverge => {
                let mut blocks = Vec::new();
                for c in &chunks {
                    let mut found = None;
                    for &k in *c {
                        match prepared.order_norm(k, &threshold, precision)? {
                            NormOrdering::Greater | NormOrdering::Equal => {
                                found = Some((k, prepared.norm(k, 96)?.lo));
                                break;
                            }
                            NormOrdering::Less => {}
                            NormOrdering::Undecidable => return Err(Error::UndecidableMembership(k)),
                        }
                    }
                    blocks.push(BlockWitness {
                        first: c[0],
                        last: *c.last().unwrap(),
                        witness: found.as_ref().map(|f| f.0),
                        norm_lower: found.map(|f| f.1),
                    });
                }
                let every = blocks.iter().all(|b| b.witness.is_some());
                reports.push(ProbeReport::Diverge { probe: beta.to_string(), blocks, every_block_witnessed: every });
            }
        }
    }
    Ok(VerifyReport {
        tail_start,
        tail_len,
        block,
        sigma: sigma.clone(),
        probes: reports,
        note: "finite-prefix bounds: these can refute a limit, never prove one",
    })
}

/// Group elements listed by enumeration index, for reports.
pub fn describe_prefix(g: &GroupSpec, t: usize) -> BTreeMap<usize, String> {
    g.prefix(t).iter().enumerate().map(|(i, a)| (i + 1, a.to_string())).collect()
}
