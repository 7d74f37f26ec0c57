//! Characterizing sequence of the finite subgroup generated by 1/5.

use circlechar::characterize::{characterize, verify, Expectation, GroupSpec};
use circlechar::{CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    let sigma = Rational::new(3.into(), 10.into());
    let g = GroupSpec::generated_by(vec![CircleElement::ratio(1, 5)])?;
    let ch = characterize(g, sigma.clone(), 4)?;
    for s in &ch.stages {
        println!("stage {}: M = {}, E_t = {:?}", s.stage, s.m, s.characters);
    }
    println!("separation certificates hold: {}", ch.certify()?);

    let seq = ch.sequence();
    println!("sequence: {:?}", seq.terms());
    let probes = [
        (CircleElement::ratio(2, 5), Expectation::Converge0),
        (CircleElement::ratio(1, 7), Expectation::Diverge),
        (CircleElement::ratio(1, 11), Expectation::Diverge),
    ];
    // stage 1 only separates 0 from the rest; judge the later stages
    let late = seq.len() - ch.stages[0].characters.len();
    let report = verify(seq.terms(), &probes, &sigma, late, 10)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}
