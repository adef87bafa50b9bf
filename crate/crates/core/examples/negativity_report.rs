//! Global, K-way and partial K-way negativities of a few named states.

use kway_negativity::negativity::negativity_report;
use kway_negativity::state::{haar_random_pure, PureState, SubsystemLayout};

fn main() -> kway_negativity::Result<()> {
    let random = haar_random_pure(&SubsystemLayout::qubits(3), 11);
    for (name, psi) in [
        ("GHZ", PureState::ghz(3)),
        ("W", PureState::w(3)),
        ("random", random),
    ] {
        let r = negativity_report(&psi.outer(), 0)?;
        println!(
            "{name:>6}: N_G={:.6} E2={:.6} E3={:.6} E0={:.6} E1={:.6}  residual {:.1e} / {:.1e}",
            r.n_global,
            r.e(2),
            r.e(3),
            r.e0,
            r.e1,
            r.sum_residual,
            r.extended_residual
        );
    }

    let four = haar_random_pure(&SubsystemLayout::qubits(4), 2);
    let r = negativity_report(&four.outer(), 0)?;
    println!("4 qubits: N_G={:.6}, E_K={:?}", r.n_global, r.e_partial);
    Ok(())
}
