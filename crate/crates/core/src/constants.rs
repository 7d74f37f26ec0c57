//! Built-in irrational constants and a decimal-expansion oracle.
//!
//! Each oracle computes a fixed-point approximation at `bits + 32` bits
//! together with a rigorous error bound in units of the last place.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::circle::{Enclosure, IrrationalSymbol};

const GUARD: u32 = 32;

fn bounded(centre: BigInt, err: u64, scale: u32) -> Enclosure {
    Enclosure { lo: &centre - err, hi: centre + err, scale }
}

/// Enclosure of √n.
pub fn sqrt_enclosure(n: u64, bits: u32) -> Enclosure {
    let s = (BigInt::from(n) << (2 * bits)).sqrt();
    Enclosure { lo: s.clone(), hi: s + 1, scale: bits }
}

/// Enclosure of e = Σ 1/k!.
pub fn e_enclosure(bits: u32) -> Enclosure {
    let w = bits + GUARD;
    let mut term = BigInt::one() << w;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        k += 1;
        term /= k;
    }
    // each truncated term is short by < 2 units; the tail is < 2 units
    Enclosure { lo: sum.clone(), hi: sum + 2 * k + 4, scale: w }
}

/// Σ (-1)^j / ((2j+1) x^(2j+1)) · 2^w, with the number of terms used.
fn atan_inv(x: u64, w: u32) -> (BigInt, u64) {
    let x2 = BigInt::from(x * x);
    let mut power = (BigInt::one() << w) / x;
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !power.is_zero() {
        let t = &power / (2 * j + 1);
        if j.is_multiple_of(2) {
            sum += t;
        } else {
            sum -= t;
        }
        power /= &x2;
        j += 1;
    }
    (sum, j)
}

/// Enclosure of π via 16·atan(1/5) − 4·atan(1/239).
pub fn pi_enclosure(bits: u32) -> Enclosure {
    let w = bits + GUARD;
    let (a, n1) = atan_inv(5, w);
    let (b, n2) = atan_inv(239, w);
    let err = 16 * (2 * n1 + 2) + 4 * (2 * n2 + 2);
    bounded(a * 16 - b * 4, err, w)
}

/// Enclosure of ln 2 = Σ 1/(k·2^k).
pub fn ln2_enclosure(bits: u32) -> Enclosure {
    let w = bits + GUARD;
    let one = BigInt::one() << w;
    let mut sum = BigInt::zero();
    for k in 1..=w as u64 + 1 {
        sum += (&one >> k) / k;
    }
    Enclosure { lo: sum.clone(), hi: sum + w as u64 + 3, scale: w }
}

/// Oracle backed by a finite decimal expansion `d.ddd…` (integer part allowed).
///
/// The expansion is treated as accurate to ±1 in the last digit, so it can
/// deliver at most about `digits · log2(10) − 2` bits.
#[derive(Debug, Clone)]
pub struct DecimalExpansion {
    numer: BigInt,
    digits: u32,
}

impl DecimalExpansion {
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        let frac: String = frac.chars().filter(|c| !c.is_whitespace()).collect();
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let numer: BigInt = format!("{int}{frac}").parse().ok()?;
        Some(DecimalExpansion { numer, digits: frac.len() as u32 })
    }

    pub fn max_bits(&self) -> u32 {
        ((self.digits as f64 * std::f64::consts::LOG2_10).floor() as u32).saturating_sub(2)
    }

    pub fn enclose(&self, bits: u32) -> Option<Enclosure> {
        if bits > self.max_bits() {
            return None;
        }
        let scale = bits + 2;
        let den = BigInt::from(10).pow(self.digits);
        let lo = ((&self.numer - 1) << scale) / &den;
        let hi = Integer::div_ceil(&((&self.numer + 1) << scale), &den);
        Some(Enclosure { lo, hi, scale })
    }

    pub fn into_symbol(self, name: impl Into<String>) -> IrrationalSymbol {
        IrrationalSymbol::from_fn(name, move |bits| self.enclose(bits))
    }
}

macro_rules! builtin {
    ($fn_name:ident, $name:literal, $raw:expr) => {
        pub fn $fn_name() -> IrrationalSymbol {
            static CELL: OnceLock<IrrationalSymbol> = OnceLock::new();
            CELL.get_or_init(|| IrrationalSymbol::from_fn($name, $raw)).clone()
        }
    };
}

builtin!(sqrt2, "sqrt2", |b| Some(sqrt_enclosure(2, b)));
builtin!(sqrt3, "sqrt3", |b| Some(sqrt_enclosure(3, b)));
builtin!(sqrt5, "sqrt5", |b| Some(sqrt_enclosure(5, b)));
builtin!(e, "e", |b| Some(e_enclosure(b)));
builtin!(pi, "pi", |b| Some(pi_enclosure(b)));
builtin!(log2, "log2", |b| Some(ln2_enclosure(b)));

/// Built-in symbol by name.
pub fn builtin(name: &str) -> Option<IrrationalSymbol> {
    Some(match name {
        "sqrt2" => sqrt2(),
        "sqrt3" => sqrt3(),
        "sqrt5" => sqrt5(),
        "e" => e(),
        "pi" => pi(),
        "log2" => log2(),
        _ => return None,
    })
}

pub const BUILTIN_NAMES: [&str; 6] = ["sqrt2", "sqrt3", "sqrt5", "e", "pi", "log2"];

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn check(enc: &Enclosure, digits: &str, bits: u32) {
        let d = DecimalExpansion::parse(digits).unwrap();
        let reference = d.enclose(d.max_bits()).unwrap();
        // the two enclosures must overlap
        let a = enc.lo_rational().max(reference.lo_rational());
        let b = enc.hi_rational().min(reference.hi_rational());
        assert!(a <= b, "disjoint enclosures for {digits}");
        assert!(enc.is_within(bits));
    }

    #[test]
    fn constants_agree_with_published_digits() {
        check(&sqrt_enclosure(2, 150), "1.41421356237309504880168872420969807856967187537694807317667973799", 150);
        check(&sqrt_enclosure(3, 150), "1.73205080756887729352744634150587236694280525381038062805580697945", 150);
        check(&e_enclosure(150), "2.71828182845904523536028747135266249775724709369995957496696762772", 150);
        check(&pi_enclosure(150), "3.14159265358979323846264338327950288419716939937510582097494459230", 150);
        check(&ln2_enclosure(150), "0.693147180559945309417232121458176568075500134360255254120680009493", 150);
    }

    #[test]
    fn decimal_precision_limit() {
        let d = DecimalExpansion::parse("0.1234567890").unwrap();
        assert_eq!(d.max_bits(), 31);
        assert!(d.enclose(31).is_some());
        assert!(d.enclose(32).is_none());
        let enc = d.enclose(20).unwrap();
        let x = BigRational::new(1234567890.into(), 10_000_000_000i64.into());
        assert!(enc.lo_rational() <= x && x <= enc.hi_rational());
        assert!(DecimalExpansion::parse("abc").is_none());
    }

    #[test]
    fn builtins_are_shared() {
        assert_eq!(builtin("pi").unwrap(), pi());
        assert!(builtin("tau").is_none());
    }
}
