//! The sequence cₙ = pⁿ + hₙ: p-adically Cauchy with a limit outside ℤ,
//! yet it pulls only finitely many points of the circle to 0.

use circlechar::padic::{circle_convergence_set, padic_limit_check, PadicSpec};

fn main() -> circlechar::Result<()> {
    let s = PadicSpec::all_ones(3)?;
    let lim = padic_limit_check(&s, 12)?;
    for row in &lim.table {
        println!("n = {:>2}  v_3(c_(n+1) - c_n) = {:?}", row.n, row.valuation);
    }
    println!("Cauchy: {}, limit digits nonzero beyond every index: {}", lim.cauchy, lim.nonzero_beyond_every_index);

    let conv = circle_convergence_set(&s, 2, 24, &[])?;
    let set: Vec<String> = conv.converge0.iter().map(ToString::to_string).collect();
    println!("a/3^l with c_n a/3^l -> 0: {{{}}}", set.join(", "));
    println!("closed under addition: {}", conv.converge0_is_subgroup);
    Ok(())
}
