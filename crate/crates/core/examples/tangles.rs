//! Wootters tangles, the three tangle and the monogamy gap.

use kway_negativity::state::{haar_random_pure, PureState, SubsystemLayout};
use kway_negativity::tangle::three_tangle_focus;

fn main() -> kway_negativity::Result<()> {
    let psi = haar_random_pure(&SubsystemLayout::qubits(3), 4);
    for (name, s) in [
        ("GHZ", PureState::ghz(3)),
        ("W", PureState::w(3)),
        ("random", psi),
    ] {
        for p in 0..3 {
            let t = three_tangle_focus(&s, p)?;
            println!(
                "{name:>6} focus {p}: tau_focus={:.6} pairs={:?} tau3={:.6}",
                t.tau_focus, t.tau_pairs, t.tau3
            );
        }
    }
    Ok(())
}
