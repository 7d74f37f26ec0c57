//! Test-side oracles, written independently of the library's arithmetic.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub const BITS: u32 = 256;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Distance to the nearest integer, exactly.
pub fn norm_q(x: &Q) -> Q {
    let f = x - x.floor();
    let g = Q::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// `floor(√n · 2^256)`.
pub fn sqrt_fixed(n: u64) -> BigInt {
    (BigInt::from(n) << (2 * BITS)).sqrt()
}

/// A real number known to lie in `[lo, lo + width] / 2^256`.
#[derive(Clone, Debug)]
pub struct Fixed {
    pub lo: BigInt,
    pub width: BigInt,
}

impl Fixed {
    pub fn sqrt(n: u64) -> Self {
        Fixed { lo: sqrt_fixed(n), width: BigInt::one() }
    }

    pub fn rational(x: &Q) -> Self {
        let scaled = x * Q::from_integer(BigInt::one() << BITS);
        Fixed { lo: scaled.floor().to_integer(), width: BigInt::one() }
    }

    pub fn mul(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        if k.is_negative() {
            Fixed { lo: (&self.lo + &self.width) * &k, width: &self.width * -k }
        } else {
            Fixed { lo: &self.lo * &k, width: &self.width * k }
        }
    }

    pub fn add(&self, o: &Fixed) -> Self {
        Fixed { lo: &self.lo + &o.lo, width: &self.width + &o.width }
    }

    pub fn neg(&self) -> Self {
        Fixed { lo: -(&self.lo + &self.width), width: self.width.clone() }
    }

    pub fn lo_q(&self) -> Q {
        Q::new(self.lo.clone(), BigInt::one() << BITS)
    }

    pub fn hi_q(&self) -> Q {
        Q::new(&self.lo + &self.width, BigInt::one() << BITS)
    }

    /// Bounds `(lower, upper)` on the circle norm over the enclosure.
    pub fn norm_bounds(&self) -> (Q, Q) {
        let (lo, hi) = norm_bounds_scaled(&self.lo, &self.width);
        let one = BigInt::one() << BITS;
        (Q::new(lo, one.clone()), Q::new(hi, one))
    }

    /// `Some(true)` if certainly `‖x‖ ≤ eps`, `Some(false)` if certainly
    /// `> eps`, `None` if the enclosure straddles.
    pub fn norm_le(&self, eps: &Q) -> Option<bool> {
        let (lo, hi) = self.norm_bounds();
        if hi <= *eps {
            Some(true)
        } else if lo > *eps {
            Some(false)
        } else {
            None
        }
    }
}

/// Norm bounds, scaled by 2^256, of any point in `[lo, lo + width] / 2^256`.
pub fn norm_bounds_scaled(lo: &BigInt, width: &BigInt) -> (BigInt, BigInt) {
    let one = BigInt::one() << BITS;
    let half = BigInt::one() << (BITS - 1);
    assert!(*width < half, "enclosure too wide");
    let a = lo.mod_floor(&one);
    let b = &a + width;
    let nrm = |x: &BigInt| -> BigInt {
        let x = if *x >= one { x - &one } else { x.clone() };
        let y = &one - &x;
        x.min(y)
    };
    let (na, nb) = (nrm(&a), nrm(&b));
    let upper = if a <= half && half <= b { half.clone() } else { na.clone().max(nb.clone()) };
    let lower = if b >= one { BigInt::zero() } else { na.min(nb) };
    (lower, upper)
}

/// A generator for brute-force scans.
#[derive(Clone, Debug)]
pub enum Gen {
    Rat(i64, i64),
    Sqrt(u64),
}

impl Gen {
    /// `‖kγ‖ ≤ eps`, decided exactly for rationals and at 256 bits otherwise.
    pub fn norm_le(&self, k: i64, eps: &Q) -> bool {
        match *self {
            Gen::Rat(a, b) => {
                let r = (k as i128 * a as i128).rem_euclid(b as i128);
                let m = r.min(b as i128 - r);
                Q::new(BigInt::from(m), BigInt::from(b)) <= *eps
            }
            Gen::Sqrt(n) => Fixed::sqrt(n).mul(k).norm_le(eps).expect("undecided at 256 bits"),
        }
    }

    pub fn norm_bounds(&self, k: i64) -> (Q, Q) {
        match *self {
            Gen::Rat(a, b) => {
                let v = norm_q(&Q::new(BigInt::from(k as i128 * a as i128), BigInt::from(b)));
                (v.clone(), v)
            }
            Gen::Sqrt(n) => Fixed::sqrt(n).mul(k).norm_bounds(),
        }
    }
}

/// `{k ∈ [1, n] : ‖kγ‖ ≤ eps for every γ}` by a direct scan, with the
/// multiples of each irrational advanced incrementally.
pub fn bohr_scan(gens: &[Gen], eps: &Q, n: i64) -> Vec<i64> {
    let (p, q) = (eps.numer().clone(), eps.denom().clone());
    let one = BigInt::one() << BITS;
    let p_one = &p * &one;
    let p_i: i128 = (&p).try_into().unwrap();
    let q_i: i128 = (&q).try_into().unwrap();
    let steps: Vec<Option<BigInt>> = gens
        .iter()
        .map(|g| match g {
            Gen::Sqrt(m) => Some(sqrt_fixed(*m)),
            Gen::Rat(..) => None,
        })
        .collect();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); gens.len()];
    let mut out = Vec::new();
    for k in 1..=n {
        let mut inside = true;
        for (i, g) in gens.iter().enumerate() {
            let ok = match (g, &steps[i]) {
                (Gen::Rat(a, b), _) => {
                    let r = (k as i128 * *a as i128).rem_euclid(*b as i128);
                    q_i * r.min(*b as i128 - r) <= p_i * *b as i128
                }
                (Gen::Sqrt(_), Some(step)) => {
                    acc[i] += step;
                    if acc[i] >= one {
                        acc[i] -= &one;
                    }
                    let (lo, hi) = norm_bounds_scaled(&acc[i], &BigInt::from(k));
                    if &q * &hi <= p_one {
                        true
                    } else if &q * &lo > p_one {
                        false
                    } else {
                        panic!("undecided at 256 bits for k = {k}")
                    }
                }
                _ => unreachable!(),
            };
            if !ok {
                inside = false;
            }
        }
        if inside {
            out.push(k);
        }
    }
    out
}

/// Exact p-adic valuation of a nonzero integer.
pub fn vp(x: &BigInt, p: u32) -> u32 {
    assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}
