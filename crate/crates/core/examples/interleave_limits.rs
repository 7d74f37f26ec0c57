//! Interleaving a homomorphism-realizing sequence with a characterizing
//! one, then reading off pointwise limits.

use circlechar::characterize::{characterize, GroupSpec};
use circlechar::constants::{sqrt2, sqrt3, sqrt5};
use circlechar::homomorphism::{classify_limit, interleave, realize_sequence, HomTarget, LimitVerdict};
use circlechar::{CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let s2 = CircleElement::symbol(&sqrt2());
    let chis = realize_sequence(&HomTarget::new(vec![(s2.clone(), CircleElement::symbol(&sqrt3()))])?, 25, 50_000_000)?;
    let g = GroupSpec::generated_by(vec![s2.clone()])?;
    let base = characterize(g, r(1, 4), 4)?.sequence();
    let n = base.len().min(chis.len());
    let primary = &chis[chis.len() - n..];
    let maker = &base.terms()[..n];
    let seq = interleave(primary, maker)?;
    println!("{} interleaved terms", seq.len());

    for (name, beta) in [
        ("sqrt2", s2.clone()),
        ("1/3", CircleElement::ratio(1, 3)),
        ("sqrt5", CircleElement::symbol(&sqrt5())),
    ] {
        let rep = classify_limit(&seq, &beta, 8, &r(1, 4), &r(1, 8))?;
        match rep.verdict {
            LimitVerdict::ConsistentWith { center } => println!("{name}: settles near {center}"),
            LimitVerdict::DivergenceWitnessed { first, second } => {
                println!("{name}: no limit ({first} and {second} land at least 1/4 apart)")
            }
            LimitVerdict::Inconclusive => println!("{name}: inconclusive"),
        }
    }
    Ok(())
}
