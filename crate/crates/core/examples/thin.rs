//! Thinning: a sequence that grows faster than any given bound while
//! still characterizing the group.

use circlechar::characterize::{verify, Expectation};
use circlechar::density::{quotients, thin};
use circlechar::{CharSequence, CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    // multiples of 5 characterize <1/5>
    let base = CharSequence::external((1..=20_000).map(|j| 5 * j).collect())?;
    let bounds: Vec<i64> = (1..=16).map(|n| 1i64 << n).collect();
    let seq = thin(&base, &bounds)?;
    println!("terms: {:?}", seq.terms());
    let max_q = quotients(seq.terms()).into_iter().max().unwrap();
    println!("largest k_(n+1)/k_n = {max_q}");

    let probes = [(CircleElement::ratio(1, 5), Expectation::Converge0), (CircleElement::ratio(1, 7), Expectation::Diverge)];
    let report = verify(seq.terms(), &probes, &Rational::new(1.into(), 4.into()), seq.len(), 6)?;
    println!("{}", serde_json::to_string_pretty(&report.probes).unwrap());
    Ok(())
}
