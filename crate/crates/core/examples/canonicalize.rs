//! Reduce a random three-qubit state to canonical form and compare the
//! closed-form values with a direct computation.

use kway_negativity::canonical::{
    canonical_closed_forms, canonicalize3, coherence_delta, numeric_closed_forms,
};
use kway_negativity::state::{haar_random_pure, SubsystemLayout};

fn main() -> kway_negativity::Result<()> {
    let psi = haar_random_pure(&SubsystemLayout::qubits(3), 8);
    let res = canonicalize3(&psi)?;
    println!("{} form(s), residual {:.1e}", res.forms.len(), res.residual);
    for br in &res.forms {
        let f = br.form;
        println!(
            "a={:.6} b={:.6} c={:.6} d={:.6} f={:.6} phi={:.6}",
            f.a, f.b, f.c, f.d, f.f, f.phi
        );
        let closed = canonical_closed_forms(&f)?;
        let (numeric, _, _) = numeric_closed_forms(&br.state())?;
        println!("  closed vs numeric: {:.1e}", closed.max_abs_diff(&numeric));
        println!(
            "  delta on canonical state {:.1e}",
            coherence_delta(&br.state())?
        );
    }
    println!("delta on input {:.6}", coherence_delta(&psi)?);
    Ok(())
}
