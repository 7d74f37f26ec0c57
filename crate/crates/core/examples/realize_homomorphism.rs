//! Characters χₙ with χₙα → f(α) for a prescribed homomorphism f.

use circlechar::circle::decimal_string;
use circlechar::constants::{sqrt2, sqrt3};
use circlechar::homomorphism::{check_solvable, realize_sequence, HomTarget};
use circlechar::CircleElement;

fn main() -> circlechar::Result<()> {
    let s2 = CircleElement::symbol(&sqrt2());
    let s3 = CircleElement::symbol(&sqrt3());
    let t = HomTarget::new(vec![(s2.clone(), s3.clone())])?;
    let chis = realize_sequence(&t, 2000, 50_000_000)?;
    for (n, &chi) in chis.iter().enumerate().skip(99).step_by(300) {
        let e = s2.mul_int(chi).enclose(64)?;
        let v = e.lo_rational() - e.lo_rational().floor();
        println!("chi_{:<4} = {chi:>6}   chi sqrt2 mod 1 ~ {}", n + 1, decimal_string(&v, 8, false));
    }
    let e = s3.enclose(64)?;
    println!("sqrt3 mod 1 ~ {}", decimal_string(&(e.lo_rational() - e.lo_rational().floor()), 8, false));

    // 1/2 has order 2, so its image must too
    let bad = HomTarget::new(vec![(CircleElement::ratio(1, 2), CircleElement::ratio(1, 3))])?;
    println!("1/2 -> 1/3: {}", check_solvable(&bad).unwrap_err());
    Ok(())
}
