//! Thickening a characterizing sequence to prescribed density on
//! intervals `[n², (n+1)²)`.

use circlechar::characterize::{characterize, GroupSpec};
use circlechar::constants::sqrt2;
use circlechar::density::{quotient_stats, thicken, IntervalPartition};
use circlechar::{CircleElement, Rational};

fn main() -> circlechar::Result<()> {
    let g = GroupSpec::generated_by(vec![CircleElement::symbol(&sqrt2())])?;
    let base = characterize(g.clone(), Rational::new(1.into(), 4.into()), 4)?.sequence();
    let partition = IntervalPartition::squares(40, 2)?;
    let (seq, plan) = thicken(&base, &partition, &g)?;
    println!("{} base terms, {} after thickening", base.len(), seq.len());
    println!("level per interval: {:?}", plan.level_curve());

    let stats = quotient_stats(seq.terms(), seq.len() / 4, Some(&partition))?;
    println!("tail max k_(n+1)/k_n = {}", stats.tail_max_quotient.unwrap());
    for c in stats.per_interval.iter().rev().take(3) {
        println!("interval {}: {} of {} (needs {})", c.interval, c.count, c.size, c.required);
    }
    Ok(())
}
