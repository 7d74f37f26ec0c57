//! Bohr sets `B(α, ε) = {k : ‖kαᵢ‖ ≤ ε}` and greedy separation.

use circlechar::bohr::{enumerate_bohr, first_bohr_above, separate, BohrParams};
use circlechar::characterize::{group_ball, neighborhood};
use circlechar::constants::sqrt2;
use circlechar::{CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    let gens = vec![CircleElement::ratio(1, 5), CircleElement::symbol(&sqrt2())];
    let p = BohrParams::new(gens, Rational::new(1.into(), 10.into()))?;
    let members = enumerate_bohr(&p, 2000)?;
    println!("B({{1/5, sqrt2}}, 1/10) up to 2000: {members:?}");
    println!("first member above 10^5: {:?}", first_bohr_above(&p, 100_000, 200_000)?);

    // Every constraint set of characters in B(sqrt2, 1/10) contains j sqrt2
    // for |j| <= 2, so the target V is a neighborhood of that ball.
    let s2 = CircleElement::symbol(&sqrt2());
    let q = BohrParams::new(vec![s2.clone()], Rational::new(1.into(), 10.into()))?;
    let sigma = Rational::new(1.into(), 4.into());
    let ball = group_ball(&[s2], 2);
    let v = neighborhood(&ball, &Rational::new(1.into(), 32.into()))?;
    println!("V = {v:?}");
    let sep = separate(&q, &sigma, &v, 1_000_000)?;
    println!("separating set {:?} (scanned to {})", sep.characters, sep.scanned);
    println!("its constraint set {:?}", sep.constraint);
    Ok(())
}
