//! Integer relation lattices of finitely many circle elements.
//!
//! For α₁…α_t the lattice is `{h ∈ ℤ^t : Σ hᵢαᵢ ∈ ℤ}`. Under the declared
//! independence of the irrational symbols and 1 this is the integer kernel
//! of a rational linear system, computed here by Hermite reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::circle::CircleElement;

/// Row-style Hermite normal form: pivots strictly move right, pivots are
/// positive, entries above a pivot lie in `[0, pivot)`. Zero rows are dropped.
pub fn hermite_rows(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<BigInt>> =
        echelon_only(rows, cols).into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    for pr in 0..rows.len() {
        let c = rows[pr].iter().position(|x| !x.is_zero()).unwrap();
        if rows[pr][c].is_negative() {
            for x in rows[pr].iter_mut() {
                *x = -&*x;
            }
        }
        for r in 0..pr {
            let q = rows[r][c].div_floor(&rows[pr][c]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(pr);
            for (x, p) in head[r].iter_mut().zip(tail[0].iter()) {
                *x -= &q * p;
            }
        }
    }
    rows
}

/// Basis of the integer kernel `{x ∈ ℤ^n : A x = 0}` for an `m × n` matrix.
pub fn integer_kernel(a: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    // rows of [Aᵀ | I]; unimodular row operations bring Aᵀ to echelon form
    let m = a.len();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = a.iter().map(|r| r[j].clone()).collect();
            row.extend((0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let reduced = echelon_only(rows, m);
    reduced
        .into_iter()
        .filter(|r| r[..m].iter().all(Zero::is_zero))
        .map(|r| r[m..].to_vec())
        .collect()
}

/// Echelon form on the first `cols` columns, keeping every row.
fn echelon_only(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let mut pivot_row = 0;
    for c in 0..cols {
        loop {
            let best = (pivot_row..rows.len())
                .filter(|&r| !rows[r][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[pivot_row][c]);
                let (head, tail) = rows.split_at_mut(r);
                for (x, p) in tail[0].iter_mut().zip(head[pivot_row].iter()) {
                    *x -= &q * p;
                }
                if !rows[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows.len() && !rows[pivot_row][c].is_zero() {
            pivot_row += 1;
        }
    }
    rows
}

/// The lattice of integer relations among a list of circle elements, in
/// Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationLattice {
    pub dim: usize,
    #[serde(serialize_with = "serialize_rows")]
    pub basis: Vec<Vec<BigInt>>,
}

fn serialize_rows<S: serde::Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    serde::Serialize::serialize(&text, s)
}

impl RelationLattice {
    pub fn of(elements: &[CircleElement]) -> Self {
        let t = elements.len();
        let mut symbols = Vec::new();
        for e in elements {
            for s in e.coefficients().keys() {
                if !symbols.contains(s) {
                    symbols.push(s.clone());
                }
            }
        }
        let mut d = BigInt::one();
        for e in elements {
            d = d.lcm(e.rational_part().denom());
            for c in e.coefficients().values() {
                d = d.lcm(c.denom());
            }
        }
        // unknowns: h₁…h_t and z, with Σ hᵢ·D·qᵢ − D·z = 0
        let scaled = |q: &num_rational::BigRational| (q * num_rational::BigRational::from_integer(d.clone())).to_integer();
        let mut a: Vec<Vec<BigInt>> = symbols
            .iter()
            .map(|s| {
                let mut row: Vec<BigInt> = elements
                    .iter()
                    .map(|e| e.coefficients().get(s).map_or_else(BigInt::zero, &scaled))
                    .collect();
                row.push(BigInt::zero());
                row
            })
            .collect();
        let mut torsion: Vec<BigInt> = elements.iter().map(|e| scaled(e.rational_part())).collect();
        torsion.push(-d.clone());
        a.push(torsion);
        let kernel = integer_kernel(&a, t + 1);
        let projected: Vec<Vec<BigInt>> = kernel.into_iter().map(|mut r| {
            r.truncate(t);
            r
        }).collect();
        RelationLattice { dim: t, basis: hermite_rows(projected) }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Full rank means the elements generate a finite subgroup of 𝕋.
    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, h: &[BigInt]) -> bool {
        if h.len() != self.dim {
            return false;
        }
        let mut v = h.to_vec();
        for row in &self.basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            if v[..p].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, rem) = v[p].div_rem(&row[p]);
            if !rem.is_zero() {
                return false;
            }
            for (x, b) in v.iter_mut().zip(row) {
                *x -= &q * b;
            }
        }
        v.iter().all(Zero::is_zero)
    }
}

/// Order of β modulo the subgroup generated by `gens`: the least e ≥ 1 with
/// eβ ∈ ⟨gens⟩, or 0 if no such multiple exists.
pub fn order_modulo(gens: &[CircleElement], beta: &CircleElement) -> BigInt {
    let mut all = gens.to_vec();
    all.push(beta.clone());
    let lattice = RelationLattice::of(&all);
    lattice.basis.iter().fold(BigInt::zero(), |g, row| g.gcd(&row[gens.len()]))
}
