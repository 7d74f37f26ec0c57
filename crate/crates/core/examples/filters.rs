//! Filter bases on the character group: Bohr neighborhoods of a subgroup
//! and of a homomorphism, refinement, and divergence witnesses.

use circlechar::bohr::BohrParams;
use circlechar::constants::{sqrt2, sqrt3};
use circlechar::filters::{divergence_witnesses, iterated_witnesses, nonempty_witness, FilterBasis};
use circlechar::homomorphism::HomTarget;
use circlechar::{CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let s2 = CircleElement::symbol(&sqrt2());
    let a = FilterBasis::Subgroup(BohrParams::new(vec![s2.clone()], r(1, 20))?);
    let b = FilterBasis::Subgroup(BohrParams::new(vec![CircleElement::ratio(1, 3)], r(1, 10))?);
    let ab = a.refine(&b)?;
    println!("first members of the refined set: {:?}", iterated_witnesses(&ab, 6, 1_000_000)?);
    println!("after excluding 99: {}", nonempty_witness(&ab.excluding([99]), 1_000_000)?);

    // sqrt3 lies outside <sqrt2>: every basis set holds characters moving it off 0
    let s3 = CircleElement::symbol(&sqrt3());
    let w = divergence_witnesses(&ab, &s3, &CircleElement::zero(), &r(1, 4), 5, 1_000_000)?;
    println!("||chi sqrt3|| >= 1/4 at {:?} (complete: {})", w.witnesses, w.complete);

    let h = FilterBasis::homomorphism(HomTarget::new(vec![(s2.clone(), CircleElement::ratio(1, 2))])?, r(1, 50))?;
    println!("chi sqrt2 within 1/50 of 1/2: {:?}", iterated_witnesses(&h, 5, 1_000_000)?);
    Ok(())
}
