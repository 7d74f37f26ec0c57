//! Exact arithmetic on the circle group 𝕋 = ℝ/ℤ.
//!
//! A [`CircleElement`] is a rational part plus a finite ℚ-combination of
//! declared irrational symbols. Symbols carry an [`Oracle`] producing dyadic
//! enclosures of their real value, so every comparison against a rational
//! threshold is decided by interval refinement: either it is certified, or
//! it is reported as undecidable at the precision cap. Nothing is ever
//! decided from a rounded float.
//!
//! Equality of elements is equality of canonical forms, which is only
//! meaningful under the declared ℚ-linear independence of the symbols and 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircleError {
    #[error("oracle for `{symbol}` cannot deliver {bits} bits")]
    OracleFailure { symbol: String, bits: u32 },
    #[error("σ = {0} is outside the admissible range")]
    InvalidSigma(String),
    #[error("comparison undecidable at {bits} bits")]
    Undecidable { bits: u32 },
    #[error("character must be nonzero")]
    ZeroCharacter,
}

/// Adaptive precision schedule: start at `start` bits and double up to `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    pub start: u32,
    pub cap: u32,
}

impl Precision {
    pub const DEFAULT_CAP: u32 = 4096;

    pub fn with_cap(cap: u32) -> Self {
        Precision { start: 64.min(cap), cap }
    }

    fn schedule(self) -> impl Iterator<Item = u32> {
        let cap = self.cap.max(8);
        let mut next = Some(self.start.clamp(8, cap));
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= cap { None } else { Some((cur * 2).min(cap)) };
            Some(cur)
        })
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision { start: 64, cap: Self::DEFAULT_CAP }
    }
}

/// The dyadic interval `[lo, hi] / 2^scale`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u32,
}

impl Enclosure {
    pub fn lo_rational(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.scale)
    }

    pub fn hi_rational(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.scale)
    }

    /// True when the width is at most `2^-bits`.
    pub fn is_within(&self, bits: u32) -> bool {
        let width = &self.hi - &self.lo;
        if bits > self.scale {
            width.is_zero()
        } else {
            width <= BigInt::one() << (self.scale - bits)
        }
    }

    fn rescaled(&self, scale: u32) -> (BigInt, BigInt) {
        debug_assert!(scale >= self.scale);
        let shift = scale - self.scale;
        (&self.lo << shift, &self.hi << shift)
    }

    /// Whether `other` lies inside `self`.
    pub fn contains(&self, other: &Enclosure) -> bool {
        let scale = self.scale.max(other.scale);
        let (a, b) = self.rescaled(scale);
        let (c, d) = other.rescaled(scale);
        a <= c && d <= b
    }

    fn intersect(&self, other: &Enclosure) -> Enclosure {
        let scale = self.scale.max(other.scale);
        let (a, b) = self.rescaled(scale);
        let (c, d) = other.rescaled(scale);
        Enclosure { lo: a.max(c), hi: b.min(d), scale }
    }
}

/// Source of rational enclosures for an irrational real.
///
/// `enclose(bits)` must return an interval of width at most `2^-bits`
/// containing the value, or `None` if that precision is unavailable.
pub trait Oracle: Send + Sync {
    fn enclose(&self, bits: u32) -> Option<Enclosure>;
}

/// Wraps a raw enclosure function so that successive answers are nested.
struct NestedOracle<F> {
    raw: F,
    best: RwLock<Option<(u32, Enclosure)>>,
}

impl<F: Fn(u32) -> Option<Enclosure> + Send + Sync> NestedOracle<F> {
    fn new(raw: F) -> Self {
        NestedOracle { raw, best: RwLock::new(None) }
    }
}

impl<F: Fn(u32) -> Option<Enclosure> + Send + Sync> Oracle for NestedOracle<F> {
    fn enclose(&self, bits: u32) -> Option<Enclosure> {
        if let Some((have, enc)) = self.best.read().unwrap().as_ref() {
            if *have >= bits {
                return Some(enc.clone());
            }
        }
        let fresh = (self.raw)(bits)?;
        let mut guard = self.best.write().unwrap();
        let merged = match guard.as_ref() {
            Some((have, prev)) if *have >= bits => return Some(prev.clone()),
            Some((_, prev)) => prev.intersect(&fresh),
            None => fresh,
        };
        *guard = Some((bits, merged.clone()));
        Some(merged)
    }
}

/// A named irrational with a precision oracle. Identity is the name.
#[derive(Clone)]
pub struct IrrationalSymbol(Arc<SymbolData>);

struct SymbolData {
    name: String,
    oracle: Box<dyn Oracle>,
}

impl IrrationalSymbol {
    pub fn new(name: impl Into<String>, oracle: impl Oracle + 'static) -> Self {
        IrrationalSymbol(Arc::new(SymbolData { name: name.into(), oracle: Box::new(oracle) }))
    }

    /// Symbol whose enclosures come from a plain function; answers are made
    /// nested automatically.
    pub fn from_fn(
        name: impl Into<String>,
        raw: impl Fn(u32) -> Option<Enclosure> + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, NestedOracle::new(raw))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn enclose(&self, bits: u32) -> Result<Enclosure, CircleError> {
        self.0
            .oracle
            .enclose(bits)
            .filter(|e| e.lo <= e.hi && e.is_within(bits))
            .ok_or_else(|| CircleError::OracleFailure { symbol: self.name().to_string(), bits })
    }
}

impl PartialEq for IrrationalSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.0.name == other.0.name
    }
}

impl Eq for IrrationalSymbol {}

impl PartialOrd for IrrationalSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IrrationalSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

impl Hash for IrrationalSymbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state)
    }
}

impl fmt::Debug for IrrationalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

fn floor_div(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den)
}

fn ceil_div(num: &BigInt, den: &BigInt) -> BigInt {
    -((-num).div_floor(den))
}

fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// A point of 𝕋 in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircleElement {
    rational: Rational,
    coeffs: BTreeMap<IrrationalSymbol, Rational>,
}

impl CircleElement {
    pub fn zero() -> Self {
        CircleElement { rational: Rational::zero(), coeffs: BTreeMap::new() }
    }

    pub fn rational(q: Rational) -> Self {
        CircleElement { rational: frac(&q), coeffs: BTreeMap::new() }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(Rational::new(num.into(), den.into()))
    }

    pub fn symbol(s: &IrrationalSymbol) -> Self {
        Self::from_parts(Rational::zero(), [(s.clone(), Rational::one())])
    }

    pub fn from_parts(
        rational: Rational,
        coeffs: impl IntoIterator<Item = (IrrationalSymbol, Rational)>,
    ) -> Self {
        let mut map: BTreeMap<IrrationalSymbol, Rational> = BTreeMap::new();
        for (s, c) in coeffs {
            *map.entry(s).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        CircleElement { rational: frac(&rational), coeffs: map }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn coefficients(&self) -> &BTreeMap<IrrationalSymbol, Rational> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.mul_big(&BigInt::from(k))
    }

    pub fn mul_big(&self, k: &BigInt) -> Self {
        let k = Rational::from_integer(k.clone());
        CircleElement::from_parts(
            &self.rational * &k,
            self.coeffs.iter().map(|(s, c)| (s.clone(), c * &k)),
        )
    }

    /// Enclosure of the representative `rational + Σ c·s` with width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> Result<Enclosure, CircleError> {
        let terms = self.coeffs.len() as u64 + 1;
        let scale = bits + bit_len(terms) + 2;
        let unit = BigInt::one() << scale;
        let num = self.rational.numer() * &unit;
        let mut lo = floor_div(&num, self.rational.denom());
        let mut hi = ceil_div(&num, self.rational.denom());
        for (s, c) in &self.coeffs {
            let mag = c.abs().ceil().to_integer().to_u64().unwrap_or(u64::MAX);
            let enc = s.enclose(scale + bit_len(mag) + 1)?;
            let (a, b) = if c.is_positive() { (&enc.lo, &enc.hi) } else { (&enc.hi, &enc.lo) };
            // c · x / 2^es expressed in units of 2^-scale
            let (shift_num, den) = if enc.scale >= scale {
                (0, c.denom() << (enc.scale - scale))
            } else {
                (scale - enc.scale, c.denom().clone())
            };
            lo += floor_div(&((c.numer() * a) << shift_num), &den);
            hi += ceil_div(&((c.numer() * b) << shift_num), &den);
        }
        Ok(Enclosure { lo, hi, scale })
    }
}

impl fmt::Display for CircleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if !self.rational.is_zero() || self.coeffs.is_empty() {
            write!(f, "{}", self.rational)?;
            wrote = true;
        }
        for (s, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if wrote {
                write!(f, " {sign} ")?;
            } else if sign == "-" {
                f.write_str("-")?;
            }
            if mag.is_one() {
                write!(f, "{}", s.name())?;
            } else {
                write!(f, "{mag}*{}", s.name())?;
            }
            wrote = true;
        }
        Ok(())
    }
}

impl fmt::Debug for CircleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{self}⟩")
    }
}

impl Add for &CircleElement {
    type Output = CircleElement;
    fn add(self, rhs: &CircleElement) -> CircleElement {
        CircleElement::from_parts(
            &self.rational + &rhs.rational,
            self.coeffs.iter().chain(rhs.coeffs.iter()).map(|(s, c)| (s.clone(), c.clone())),
        )
    }
}

impl Neg for &CircleElement {
    type Output = CircleElement;
    fn neg(self) -> CircleElement {
        self.mul_int(-1)
    }
}

impl Sub for &CircleElement {
    type Output = CircleElement;
    fn sub(self, rhs: &CircleElement) -> CircleElement {
        self + &(-rhs)
    }
}

/// Certified enclosure of ‖kα‖.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormBound {
    pub lo: Rational,
    pub hi: Rational,
    /// Whether the bound is exact (purely rational input).
    pub exact: bool,
}

/// ‖x‖ for rational x.
pub fn rational_norm(x: &Rational) -> Rational {
    let f = frac(x);
    let other = Rational::one() - &f;
    if f <= other {
        f
    } else {
        other
    }
}

/// Norm interval, in units of `2^-scale`, of the dyadic interval `[lo, hi]`.
fn dyadic_norm(lo: &BigInt, hi: &BigInt, scale: u32) -> (BigInt, BigInt) {
    let unit = BigInt::one() << scale;
    let half = BigInt::one() << (scale - 1);
    let width = hi - lo;
    if width >= unit {
        return (BigInt::zero(), half);
    }
    let l = lo.mod_floor(&unit);
    let h = &l + &width;
    let fold = |y: &BigInt| -> BigInt {
        let y = y.mod_floor(&unit);
        if y <= half {
            y
        } else {
            &unit - y
        }
    };
    let nl = fold(&l);
    let nh = fold(&h);
    let lo_n = if h >= unit { BigInt::zero() } else { nl.clone().min(nh.clone()) };
    let contains_half = (l <= half && half <= h) || {
        let second = &unit + &half;
        l <= second && second <= h
    };
    let hi_n = if contains_half { half } else { nl.max(nh) };
    (lo_n, hi_n)
}

/// ‖kα‖ enclosed to width at most `2^(2-precision)`; exact for rational α.
pub fn norm(alpha: &CircleElement, k: i64, precision: u32) -> Result<NormBound, CircleError> {
    if alpha.is_rational() {
        let v = rational_norm(&(alpha.rational_part() * Rational::from_integer(k.into())));
        return Ok(NormBound { lo: v.clone(), hi: v, exact: true });
    }
    let precision = precision.max(8);
    let kbits = bit_len(k.unsigned_abs());
    let enc = alpha.enclose(precision + kbits + 1)?;
    let kb = BigInt::from(k);
    let (a, b) = if k >= 0 { (&enc.lo * &kb, &enc.hi * &kb) } else { (&enc.hi * &kb, &enc.lo * &kb) };
    let (lo, hi) = dyadic_norm(&a, &b, enc.scale);
    let unit = BigInt::one() << enc.scale;
    Ok(NormBound {
        lo: Rational::new(lo, unit.clone()),
        hi: Rational::new(hi, unit),
        exact: false,
    })
}

/// Result of comparing ‖x‖ with a rational threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrdering {
    Less,
    Equal,
    Greater,
    Undecidable,
}

impl NormOrdering {
    /// `Some(‖x‖ ≤ t)` when decided.
    pub fn le(self) -> Option<bool> {
        match self {
            NormOrdering::Less | NormOrdering::Equal => Some(true),
            NormOrdering::Greater => Some(false),
            NormOrdering::Undecidable => None,
        }
    }

    /// `Some(‖x‖ < t)` when decided.
    pub fn lt(self) -> Option<bool> {
        match self {
            NormOrdering::Less => Some(true),
            NormOrdering::Equal | NormOrdering::Greater => Some(false),
            NormOrdering::Undecidable => None,
        }
    }

    /// `Some(‖x‖ ≥ t)` when decided.
    pub fn ge(self) -> Option<bool> {
        self.lt().map(|b| !b)
    }
}

/// Verdict of [`compare_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum NormVerdict {
    Le,
    Gt,
    Undecidable,
}

/// A rational threshold in `[0, 1/2]`, pre-split for fast comparisons.
#[derive(Debug, Clone)]
pub struct Threshold {
    value: Rational,
    small: Option<(i128, i128)>,
}

impl Threshold {
    pub fn new(value: Rational) -> Self {
        let small = value
            .numer()
            .to_i64()
            .zip(value.denom().to_i64())
            .map(|(n, d)| (n as i128, d as i128));
        Threshold { value, small }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    fn cmp_units(&self, n: &BigInt, scale: u32) -> Ordering {
        // n / 2^scale  vs  num / den
        (n * self.value.denom()).cmp(&(self.value.numer() << scale))
    }
}

/// A circle element with a cached enclosure, for repeated ‖k·α + shift‖ queries.
pub struct PreparedElement {
    element: CircleElement,
    small_rational: Option<(i128, i128)>,
    cache: Mutex<Option<Enclosure>>,
}

impl Clone for PreparedElement {
    fn clone(&self) -> Self {
        PreparedElement {
            element: self.element.clone(),
            small_rational: self.small_rational,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl fmt::Debug for PreparedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prepared({})", self.element)
    }
}

impl PreparedElement {
    pub fn new(element: CircleElement) -> Self {
        let small_rational = if element.is_rational() {
            let q = element.rational_part();
            q.numer().to_i64().zip(q.denom().to_i64()).map(|(n, d)| (n as i128, d as i128))
        } else {
            None
        };
        PreparedElement { element, small_rational, cache: Mutex::new(None) }
    }

    pub fn element(&self) -> &CircleElement {
        &self.element
    }

    /// Enclosure of the representative with width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> Result<Enclosure, CircleError> {
        let mut guard = self.cache.lock().unwrap();
        if let Some(enc) = guard.as_ref() {
            if enc.is_within(bits) {
                return Ok(enc.clone());
            }
        }
        let enc = self.element.enclose(bits)?;
        *guard = Some(enc.clone());
        Ok(enc)
    }

    /// Compares ‖kα‖ with `threshold`, refining up to `precision.cap` bits.
    pub fn order_norm(&self, k: i64, threshold: &Threshold, precision: Precision) -> Result<NormOrdering, CircleError> {
        self.order_norm_shifted(k, None, threshold, precision)
    }

    /// Compares ‖kα − c‖ with `threshold`, where `c` is an optional center.
    pub fn order_norm_shifted(
        &self,
        k: i64,
        center: Option<&PreparedElement>,
        threshold: &Threshold,
        precision: Precision,
    ) -> Result<NormOrdering, CircleError> {
        if let (Some((a, b)), None, Some((tn, td))) = (self.small_rational, center, threshold.small) {
            // exact fast path: ‖k a / b‖ = min(r, b - r) / b
            let r = (k as i128 * a).rem_euclid(b);
            let n = r.min(b - r);
            return Ok(match (n * td).cmp(&(tn * b)) {
                Ordering::Less => NormOrdering::Less,
                Ordering::Equal => NormOrdering::Equal,
                Ordering::Greater => NormOrdering::Greater,
            });
        }
        let center_rational = center.is_none_or(|c| c.element.is_rational());
        if self.element.is_rational() && center_rational {
            let mut x = self.element.rational_part() * Rational::from_integer(k.into());
            if let Some(c) = center {
                x -= c.element.rational_part();
            }
            return Ok(match rational_norm(&x).cmp(threshold.value()) {
                Ordering::Less => NormOrdering::Less,
                Ordering::Equal => NormOrdering::Equal,
                Ordering::Greater => NormOrdering::Greater,
            });
        }
        let kbits = bit_len(k.unsigned_abs());
        let kb = BigInt::from(k);
        for bits in precision.schedule() {
            let enc = self.enclose(bits + kbits + 2)?;
            let (mut a, mut b) =
                if k >= 0 { (&enc.lo * &kb, &enc.hi * &kb) } else { (&enc.hi * &kb, &enc.lo * &kb) };
            let mut scale = enc.scale;
            if let Some(c) = center {
                let cenc = c.enclose(bits + 2)?;
                let s = scale.max(cenc.scale);
                a <<= s - scale;
                b <<= s - scale;
                let (cl, ch) = cenc.rescaled(s);
                a -= ch;
                b -= cl;
                scale = s;
            }
            let (lo, hi) = dyadic_norm(&a, &b, scale);
            if threshold.cmp_units(&hi, scale) == Ordering::Less {
                return Ok(NormOrdering::Less);
            }
            if threshold.cmp_units(&lo, scale) == Ordering::Greater {
                return Ok(NormOrdering::Greater);
            }
        }
        Ok(NormOrdering::Undecidable)
    }

    /// Enclosure of ‖kα‖ as a [`NormBound`] at the given precision.
    pub fn norm(&self, k: i64, precision: u32) -> Result<NormBound, CircleError> {
        if self.element.is_rational() {
            return norm(&self.element, k, precision);
        }
        let kbits = bit_len(k.unsigned_abs());
        let enc = self.enclose(precision.max(8) + kbits + 1)?;
        let kb = BigInt::from(k);
        let (a, b) = if k >= 0 { (&enc.lo * &kb, &enc.hi * &kb) } else { (&enc.hi * &kb, &enc.lo * &kb) };
        let (lo, hi) = dyadic_norm(&a, &b, enc.scale);
        let unit = BigInt::one() << enc.scale;
        Ok(NormBound { lo: Rational::new(lo, unit.clone()), hi: Rational::new(hi, unit), exact: false })
    }
}

/// Decides ‖kα‖ ≤ threshold, refining precision up to `max_precision` bits.
pub fn compare_norm(alpha: &CircleElement, k: i64, threshold: &Rational, max_precision: u32) -> NormVerdict {
    let prepared = PreparedElement::new(alpha.clone());
    match prepared.order_norm(k, &Threshold::new(threshold.clone()), Precision::with_cap(max_precision)) {
        Ok(NormOrdering::Less | NormOrdering::Equal) => NormVerdict::Le,
        Ok(NormOrdering::Greater) => NormVerdict::Gt,
        Ok(NormOrdering::Undecidable) | Err(_) => NormVerdict::Undecidable,
    }
}

/// Where a point sits relative to an [`ArcSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Boundary,
}

/// A finite union of closed arcs of 𝕋 with rational endpoints.
///
/// Stored as sorted, pairwise disjoint, non-touching closed pieces of
/// `[0, 1]`. An arc through 0 is split into a piece ending at 1 and a piece
/// starting at 0; whenever a piece ends at 1 a piece starting at 0 is
/// present (possibly the single point `[0, 0]`). The empty set is `[]` and
/// the full circle is `[[0, 1]]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ArcSet {
    pieces: Vec<(Rational, Rational)>,
}

impl fmt::Debug for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.arcs().iter().map(|(a, b)| format!("[{a}, {b}]"))).finish()
    }
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { pieces: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet { pieces: vec![(Rational::zero(), Rational::one())] }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].0.is_zero() && self.pieces[0].1.is_one()
    }

    /// Union of arcs `[start, end]` taken mod 1 (`end - start` ≥ 1 means the full circle).
    pub fn from_arcs(arcs: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let mut pieces = Vec::new();
        for (start, end) in arcs {
            assert!(start <= end, "arc endpoints out of order");
            let len = &end - &start;
            if len >= Rational::one() {
                return ArcSet::full();
            }
            let s = frac(&start);
            let e = &s + &len;
            if e <= Rational::one() {
                pieces.push((s, e));
            } else {
                pieces.push((s, Rational::one()));
                pieces.push((Rational::zero(), e - Rational::one()));
            }
        }
        Self::canonical(pieces)
    }

    fn canonical(mut pieces: Vec<(Rational, Rational)>) -> Self {
        for p in pieces.iter_mut() {
            if p.0.is_one() {
                *p = (Rational::zero(), Rational::zero());
            }
        }
        pieces.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len());
        for (a, b) in pieces {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        if let Some(last) = merged.last() {
            if last.1.is_one() && !merged[0].0.is_zero() {
                merged.insert(0, (Rational::zero(), Rational::zero()));
            }
        }
        ArcSet { pieces: merged }
    }

    /// Arcs as `(start, end)` with `start ∈ [0,1)`; the arc through 0, if any,
    /// is reported once with `end > 1`.
    pub fn arcs(&self) -> Vec<(Rational, Rational)> {
        if self.is_full() {
            return vec![(Rational::zero(), Rational::one())];
        }
        let mut out: Vec<(Rational, Rational)> = self.pieces.clone();
        if out.len() >= 2 && out[0].0.is_zero() && out[out.len() - 1].1.is_one() {
            let first = out.remove(0);
            let last = out.last_mut().unwrap();
            last.1 = Rational::one() + first.1;
        }
        out
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn arc_count(&self) -> usize {
        self.arcs().len()
    }

    pub fn measure(&self) -> Rational {
        self.pieces.iter().fold(Rational::zero(), |acc, (a, b)| acc + (b - a))
    }

    /// `{β : ‖kβ‖ ≤ σ}` as |k| arcs of length 2σ/|k| centered at j/|k|.
    pub fn from_constraint(k: i64, sigma: &Rational) -> Result<Self, CircleError> {
        if k == 0 {
            return Err(CircleError::ZeroCharacter);
        }
        check_sigma(sigma, &Rational::new(1.into(), 2.into()))?;
        Ok(ArcSet::full().intersect_constraint(k, sigma))
    }

    /// `self ∩ {β : ‖kβ‖ ≤ σ}`; cost proportional to the output size.
    pub fn intersect_constraint(&self, k: i64, sigma: &Rational) -> Self {
        let kk = Rational::from_integer(BigInt::from(k.unsigned_abs()));
        let mut out = Vec::new();
        for (a, b) in &self.pieces {
            let first = (&kk * a - sigma).ceil().to_integer();
            let last = (&kk * b + sigma).floor().to_integer();
            let mut j = first;
            while j <= last {
                let jr = Rational::from_integer(j.clone());
                let lo = (&jr - sigma) / &kk;
                let hi = (&jr + sigma) / &kk;
                let s = if &lo > a { lo } else { a.clone() };
                let e = if &hi < b { hi } else { b.clone() };
                if s <= e {
                    out.push((s, e));
                }
                j += 1;
            }
        }
        Self::canonical(out)
    }

    /// Whether `self ⊆ {β : ‖kβ‖ ≤ σ}`.
    pub fn within_constraint(&self, k: i64, sigma: &Rational) -> bool {
        let kk = Rational::from_integer(BigInt::from(k.unsigned_abs()));
        self.pieces.iter().all(|(a, b)| {
            let j = (&kk * b - sigma).ceil();
            j <= &kk * a + sigma
        })
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.pieces.len() && j < other.pieces.len() {
            let (a, b) = &self.pieces[i];
            let (c, d) = &other.pieces[j];
            let s = a.max(c);
            let e = b.min(d);
            if s <= e {
                out.push((s.clone(), e.clone()));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::canonical(out)
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        Self::canonical(self.pieces.iter().chain(other.pieces.iter()).cloned().collect())
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &ArcSet) -> bool {
        let mut i = 0;
        for (c, d) in &other.pieces {
            while i < self.pieces.len() && self.pieces[i].1 < *c {
                i += 1;
            }
            match self.pieces.get(i) {
                Some((a, b)) if a <= c && d <= b => {}
                _ => return false,
            }
        }
        true
    }

    fn wraps(&self) -> bool {
        !self.pieces.is_empty()
            && self.pieces[0].0.is_zero()
            && self.pieces[self.pieces.len() - 1].1.is_one()
    }

    fn member_rational(&self, x: &Rational) -> Membership {
        for (a, b) in &self.pieces {
            if a <= x && x <= b {
                let genuine_left = !(a.is_zero() && self.wraps());
                if (x == a && genuine_left) || (x == b && !b.is_one()) {
                    return Membership::Boundary;
                }
                return Membership::In;
            }
        }
        Membership::Out
    }

    /// Membership of β, refining irrational β until it is separated from every endpoint.
    pub fn member(&self, beta: &CircleElement, max_precision: u32) -> Result<Membership, CircleError> {
        if beta.is_rational() {
            return Ok(self.member_rational(beta.rational_part()));
        }
        if self.is_full() {
            return Ok(Membership::In);
        }
        if self.is_empty() {
            return Ok(Membership::Out);
        }
        let prepared = PreparedElement::new(beta.clone());
        for bits in Precision::with_cap(max_precision).schedule() {
            let enc = prepared.enclose(bits)?;
            let unit = BigInt::one() << enc.scale;
            let lo = enc.lo.mod_floor(&unit);
            let hi = &lo + (&enc.hi - &enc.lo);
            if hi >= unit {
                continue;
            }
            let l = Rational::new(lo, unit.clone());
            let h = Rational::new(hi, unit);
            let lm = self.member_rational(&l);
            let hm = self.member_rational(&h);
            if lm == Membership::Boundary || hm == Membership::Boundary || lm != hm {
                continue;
            }
            // both ends agree; make sure no endpoint sits strictly between them
            let crosses = self.pieces.iter().any(|(a, b)| (&l < a && a < &h) || (&l < b && b < &h));
            if !crosses {
                return Ok(lm);
            }
        }
        Err(CircleError::Undecidable { bits: max_precision })
    }
}

/// Decimal rendering of `q` with `digits` fractional digits, rounded down or up.
pub fn decimal_string(q: &Rational, digits: usize, round_up: bool) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = q * Rational::from_integer(scale);
    let n = if round_up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

pub(crate) fn check_sigma(sigma: &Rational, upper: &Rational) -> Result<(), CircleError> {
    if sigma.is_positive() && sigma < upper {
        Ok(())
    } else {
        Err(CircleError::InvalidSigma(sigma.to_string()))
    }
}

/// Intersection of arbitrarily many arc sets.
pub fn arcset_intersect_all<'a>(sets: impl IntoIterator<Item = &'a ArcSet>) -> ArcSet {
    sets.into_iter().fold(ArcSet::full(), |acc, s| acc.intersect(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn sqrt2() -> CircleElement {
        CircleElement::symbol(&constants::sqrt2())
    }

    /// √2 to 60 decimal places, from an independent hand-checked expansion.
    const SQRT2_60: &str = "1.414213562373095048801688724209698078569671875376948073176679";

    fn decimal_frac_times(k: i64) -> Rational {
        let digits: String = SQRT2_60.chars().filter(|c| *c != '.').collect();
        let n: BigInt = digits.parse().unwrap();
        let q = Rational::new(n * k, BigInt::from(10).pow(60));
        rational_norm(&q)
    }

    #[test]
    fn rational_norms_are_exact() {
        let a = CircleElement::ratio(1, 5);
        let b = norm(&a, 7, 64).unwrap();
        assert!(b.exact);
        assert_eq!(b.lo, r(2, 5));
        assert_eq!(norm(&a, 5, 64).unwrap().hi, r(0, 1));
    }

    #[test]
    fn sqrt2_times_29_matches_decimal_expansion() {
        let expected = decimal_frac_times(29);
        let b = norm(&sqrt2(), 29, 64).unwrap();
        assert!(b.lo <= expected && expected <= b.hi);
        assert!(&b.hi - &b.lo <= r(1, 1 << 62) * r(4, 1));
        // 0.01219…
        assert!(b.lo > r(1219, 100_000) && b.hi < r(1220, 100_000));
    }

    #[test]
    fn compare_norm_examples() {
        let third = CircleElement::ratio(1, 3);
        assert_eq!(compare_norm(&third, 1, &r(1, 3), 4096), NormVerdict::Le);
        assert_eq!(compare_norm(&third, 1, &r(3, 10), 4096), NormVerdict::Gt);
        // ‖99√2‖ ≈ 0.0071
        assert!(decimal_frac_times(99) < r(1, 100));
        assert_eq!(compare_norm(&sqrt2(), 99, &r(1, 100), 4096), NormVerdict::Le);
    }

    #[test]
    fn constraint_arcs() {
        let s = ArcSet::from_constraint(2, &r(1, 10)).unwrap();
        assert_eq!(s.arcs(), vec![(r(9, 20), r(11, 20)), (r(19, 20), r(21, 20))]);
        let s = ArcSet::from_constraint(1, &r(1, 4)).unwrap();
        assert_eq!(s.arcs(), vec![(r(3, 4), r(5, 4))]);
        let s = ArcSet::from_constraint(3, &r(6, 100)).unwrap();
        assert_eq!(s.arc_count(), 3);
        for (a, b) in s.arcs() {
            assert_eq!(b - a, r(4, 100));
        }
        assert_eq!(s.measure(), r(12, 100));
        assert!(ArcSet::from_constraint(2, &r(1, 2)).is_err());
        assert!(ArcSet::from_constraint(0, &r(1, 4)).is_err());
    }

    #[test]
    fn intersect_and_contains() {
        let a = ArcSet::from_arcs([(r(0, 1), r(1, 10))]);
        let b = ArcSet::from_arcs([(r(5, 100), r(2, 10))]);
        assert_eq!(a.intersect(&b), ArcSet::from_arcs([(r(5, 100), r(1, 10))]));
        assert!(ArcSet::full().contains(&a));
        assert!(ArcSet::full().contains(&ArcSet::full()));
        assert!(!a.contains(&b));
        assert!(a.contains(&ArcSet::empty()));
    }

    #[test]
    fn wrap_arcs_merge_and_touching_arcs_merge() {
        let a = ArcSet::from_arcs([(r(-1, 10), r(1, 10))]);
        assert_eq!(a.arcs(), vec![(r(9, 10), r(11, 10))]);
        let b = ArcSet::from_arcs([(r(1, 10), r(2, 10)), (r(2, 10), r(3, 10))]);
        assert_eq!(b.arcs(), vec![(r(1, 10), r(3, 10))]);
        let c = ArcSet::from_arcs([(r(9, 10), r(1, 1))]);
        assert_eq!(c, ArcSet::from_arcs([(r(9, 10), r(1, 1)), (r(0, 1), r(0, 1))]));
    }

    #[test]
    fn membership() {
        let set = ArcSet::from_constraint(3, &r(6, 100)).unwrap();
        assert_eq!(set.member(&sqrt2(), 4096).unwrap(), Membership::Out);
        assert_eq!(set.member(&CircleElement::ratio(1, 3), 4096).unwrap(), Membership::In);
        assert_eq!(set.member(&CircleElement::ratio(2, 100), 4096).unwrap(), Membership::Boundary);
        assert_eq!(set.member(&CircleElement::zero(), 4096).unwrap(), Membership::In);
        let near = ArcSet::from_arcs([(r(41, 100), r(42, 100))]);
        assert_eq!(near.member(&sqrt2(), 4096).unwrap(), Membership::In);
    }

    #[test]
    fn element_canonical_forms() {
        let s = sqrt2();
        let a = &s + &CircleElement::ratio(-1, 1);
        assert_eq!(a, s);
        let z = &s - &s;
        assert!(z.is_zero());
        assert_eq!(CircleElement::ratio(7, 5), CircleElement::ratio(2, 5));
        assert_eq!(format!("{}", &CircleElement::ratio(1, 6) + &s), "1/6 + sqrt2");
    }

    #[test]
    fn decimal_rendering_rounds_outward() {
        assert_eq!(decimal_string(&r(1, 3), 4, false), "0.3333");
        assert_eq!(decimal_string(&r(1, 3), 4, true), "0.3334");
        assert_eq!(decimal_string(&r(5, 2), 0, true), "3");
        assert_eq!(decimal_string(&r(-1, 8), 2, false), "-0.13");
        assert_eq!(decimal_string(&r(1, 100), 3, false), "0.010");
    }

    #[test]
    fn oracle_failure_surfaces() {
        let sym = IrrationalSymbol::from_fn("short", |bits| {
            (bits <= 20).then(|| Enclosure { lo: BigInt::from(1), hi: BigInt::from(2), scale: 21 })
        });
        let x = CircleElement::symbol(&sym);
        assert!(matches!(norm(&x, 1, 64), Err(CircleError::OracleFailure { .. })));
    }

    #[test]
    fn nested_oracle_answers() {
        let s = constants::sqrt2();
        let coarse = s.enclose(40).unwrap();
        let fine = s.enclose(300).unwrap();
        assert!(coarse.contains(&fine));
    }
}
