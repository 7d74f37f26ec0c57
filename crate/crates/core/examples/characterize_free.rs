//! Characterizing sequence of the cyclic group generated by sqrt2, and a
//! witness sequence keeping sqrt3 away from 0 while sqrt2 converges.

use circlechar::characterize::{characterize, g_closed_witness, verify, Expectation, GroupSpec};
use circlechar::circle::decimal_string;
use circlechar::constants::{sqrt2, sqrt3};
use circlechar::{CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    let sigma = Rational::new(1.into(), 4.into());
    let s2 = CircleElement::symbol(&sqrt2());
    let g = GroupSpec::generated_by(vec![s2.clone()])?;
    let ch = characterize(g.clone(), sigma.clone(), 4)?;
    for s in &ch.stages {
        println!(
            "stage {}: M = {}, ball {} points, radius {}, |E_t| = {}",
            s.stage,
            s.m,
            s.ball_size,
            s.radius,
            s.characters.len()
        );
    }
    let seq = ch.sequence();
    let probes = [(s2.clone(), Expectation::Converge0), (CircleElement::ratio(1, 3), Expectation::Diverge)];
    let report = verify(seq.terms(), &probes, &sigma, seq.len() / 2, 50)?;
    for p in &report.probes {
        println!("{}", serde_json::to_string(p).unwrap());
    }

    let s3 = CircleElement::symbol(&sqrt3());
    let (target, w) = g_closed_witness(&g, &s3, 8, 10_000_000)?;
    println!("sqrt3 pushed towards {target}: {:?}", w.terms());
    for &k in w.terms() {
        let b = s3.mul_int(k).enclose(64)?;
        println!("  {k:>8} sqrt3 mod 1 ~ {}", decimal_string(&(b.lo_rational() - b.lo_rational().floor()), 6, false));
    }
    Ok(())
}
