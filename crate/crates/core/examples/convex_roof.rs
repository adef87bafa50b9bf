//! Convex-roof negativity of two-qubit reduced states, next to the direct
//! negativity and the concurrence.

use kway_negativity::ghzw::{build_ghzw, minus_branch_zero, GhzwParams, Sign};
use kway_negativity::roof::{reduced_pair_negativity, roof_pair_negativity, RoofBudget};
use kway_negativity::state::PureState;
use kway_negativity::tangle::concurrence;

fn main() -> kway_negativity::Result<()> {
    let budget = RoofBudget::default();
    let zero = build_ghzw(&GhzwParams::new(minus_branch_zero(), Sign::Minus)?)?;
    for (name, psi) in [("W", PureState::w(3)), ("GHZ+W zero", zero)] {
        for pair in [(0, 1), (0, 2)] {
            let roof = roof_pair_negativity(&psi, pair, &budget)?;
            let direct = reduced_pair_negativity(&psi, pair)?;
            let c = concurrence(&psi.outer().partial_trace(&[pair.0, pair.1])?)?;
            println!(
                "{name} {pair:?}: roof={:.6} (squared {:.4}) direct={direct:.6} concurrence={c:.6} converged={}",
                roof.value,
                roof.value * roof.value,
                roof.converged
            );
        }
    }
    Ok(())
}
