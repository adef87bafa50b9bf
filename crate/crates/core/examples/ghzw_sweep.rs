//! Superpositions of GHZ and W: three tangle, canonical E3 and the zero of
//! the minus branch.

use kway_negativity::ghzw::{
    double_root_q, ghzw_canonical_params, minus_branch_zero, sweep_family, GhzwParams, Sign,
};

fn main() -> kway_negativity::Result<()> {
    for sign in [Sign::Plus, Sign::Minus] {
        println!("sign {sign:?}");
        for r in sweep_family(sign, 0.0, 1.0, 11)? {
            println!(
                "  q={:.2} N_G={:.4} E2={:.4} E3={:.4} tau3={:.4} E3*N_G={:.4} delta={:+.4}",
                r.q, r.n_global, r.e2, r.e3, r.tau3_formula, r.e3_times_ng, r.delta
            );
        }
    }
    let z = minus_branch_zero();
    println!(
        "zero of the minus branch: q={z:.7} (double root at {:.7})",
        double_root_q()
    );
    let c = ghzw_canonical_params(&GhzwParams::new(z, Sign::Minus)?)?;
    println!(
        "alpha={:.5} beta={:.5} forms={}",
        c.alpha,
        c.beta,
        c.result.forms.len()
    );
    Ok(())
}
