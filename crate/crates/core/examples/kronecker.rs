//! Simultaneous inhomogeneous approximation, gated by integer relations.

use circlechar::bohr::{kronecker_solve, KroneckerOutcome, KroneckerTarget, TargetArc};
use circlechar::constants::{sqrt2, sqrt3};
use circlechar::lattice::RelationLattice;
use circlechar::{CircleElement, Rational};

fn solve(label: &str, pairs: Vec<(CircleElement, TargetArc)>) -> circlechar::Result<()> {
    let sources: Vec<CircleElement> = pairs.iter().map(|(g, _)| g.clone()).collect();
    let lattice = RelationLattice::of(&sources);
    let out = kronecker_solve(&KroneckerTarget { pairs }, &lattice, 1_000_000)?;
    match out {
        KroneckerOutcome::Found(k) => println!("{label}: k = {k}"),
        KroneckerOutcome::NotFound { bound, exhaustive } => {
            println!("{label}: none up to {bound} (provably none: {exhaustive})")
        }
    }
    Ok(())
}

fn main() -> circlechar::Result<()> {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let s2 = CircleElement::symbol(&sqrt2());
    let s3 = CircleElement::symbol(&sqrt3());

    solve(
        "k sqrt2 near 1/2, k sqrt3 near 0",
        vec![
            (s2.clone(), TargetArc::new(CircleElement::ratio(1, 2), r(1, 100))?),
            (s3.clone(), TargetArc::new(CircleElement::zero(), r(1, 100))?),
        ],
    )?;
    // k/4 hits only multiples of 1/4, so a target at 1/8 is unreachable
    solve("k/4 near 1/8", vec![(CircleElement::ratio(1, 4), TargetArc::new(CircleElement::ratio(1, 8), r(1, 16))?)])?;
    // sqrt2 and 2 sqrt2 are related: targets must respect the doubling
    solve(
        "k sqrt2 near 1/3, 2k sqrt2 near 2/3",
        vec![
            (s2.clone(), TargetArc::new(CircleElement::ratio(1, 3), r(1, 200))?),
            (s2.mul_int(2), TargetArc::new(CircleElement::ratio(2, 3), r(1, 200))?),
        ],
    )?;
    Ok(())
}
