//! Reduced states of the W state and the transposes built from them.

use kway_negativity::state::PureState;
use kway_negativity::transpose::{global_pt, kway_pt};

fn main() -> kway_negativity::Result<()> {
    let rho = PureState::w(3).outer();
    let ab = rho.partial_trace(&[0, 1])?;
    println!("rho_AB =\n{:.4}", ab.matrix().map(|z| z.re));
    let a = rho.partial_trace(&[0])?;
    println!(
        "rho_A diagonal: {:.4} {:.4}",
        a.matrix()[(0, 0)].re,
        a.matrix()[(1, 1)].re
    );

    let g = global_pt(&rho, 0)?;
    let k2 = kway_pt(&rho, 2, 0)?;
    println!(
        "global and 2-way transposes agree here: {}",
        (g - k2).norm() < 1e-15
    );
    Ok(())
}
