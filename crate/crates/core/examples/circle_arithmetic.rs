//! Exact circle elements, certified norms and rigorous comparisons.

use circlechar::circle::{compare_norm, decimal_string, norm, NormVerdict};
use circlechar::constants::{pi, sqrt2};
use circlechar::{CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    let third = CircleElement::ratio(1, 3);
    let s2 = CircleElement::symbol(&sqrt2());
    // 1/3 + sqrt2 - sqrt2 collapses back to a rational
    let x = &(&third + &s2) + &s2.mul_int(-1);
    println!("1/3 + sqrt2 - sqrt2 = {x} (rational: {})", x.is_rational());

    for k in [1, 5, 12, 29, 70, 169] {
        let b = norm(&s2, k, 128)?;
        println!(
            "||{k:>3} sqrt2|| in [{}, {}]",
            decimal_string(&b.lo, 12, false),
            decimal_string(&b.hi, 12, true)
        );
    }

    let eps = Rational::new(1.into(), 100.into());
    let p = CircleElement::symbol(&pi());
    for k in [7, 113, 355] {
        let v = compare_norm(&p, k, &eps, 4096);
        let word = match v {
            NormVerdict::Le => "within",
            NormVerdict::Gt => "outside",
            NormVerdict::Undecidable => "undecided at",
        };
        println!("{k} pi is {word} 1/100 of an integer");
    }
    Ok(())
}
