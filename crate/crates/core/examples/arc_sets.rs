//! Exact arc sets and the constraint sets `{β : ‖kβ‖ ≤ σ, k ∈ E}`.

use std::collections::BTreeSet;

use circlechar::bohr::constraint_set;
use circlechar::circle::Membership;
use circlechar::{ArcSet, CircleElement, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn main() -> circlechar::Result<()> {
    let sigma = r(1, 4);
    let a = ArcSet::from_constraint(3, &sigma)?;
    println!("||3b|| <= 1/4: {a:?}, measure {}", a.measure());

    let e: BTreeSet<i64> = [1, 2, 5].into();
    let c = constraint_set(&e, &sigma)?;
    println!("E = {e:?}: {c:?}, measure {}", c.measure());

    // wrap-around arc through 0
    let w = ArcSet::from_arcs([(r(7, 8), r(9, 8))]);
    println!("[7/8, 9/8] mod 1 = {w:?}");
    println!("intersection with E's set: {:?}", w.intersect(&c));

    for b in [r(0, 1), r(1, 20), r(1, 8), r(1, 3)] {
        let m = c.member(&CircleElement::rational(b.clone()), 64)?;
        let word = match m {
            Membership::In => "inside",
            Membership::Boundary => "on the boundary",
            Membership::Out => "outside",
        };
        println!("{b} is {word}");
    }
    Ok(())
}
