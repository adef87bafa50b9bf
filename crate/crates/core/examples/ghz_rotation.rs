//! E3 and E2 of a GHZ-like state as one qubit is rotated.

use kway_negativity::canonical::{ghz_rotation_numeric, ghz_rotation_profile};

fn main() -> kway_negativity::Result<()> {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    println!("alpha      E3        E2     (numeric E3, E2)");
    for i in 0..=10 {
        let alpha = std::f64::consts::PI * i as f64 / 10.0;
        let (e3, e2) = ghz_rotation_profile(a, alpha)?;
        let (n3, n2) = ghz_rotation_numeric(a, alpha)?;
        println!("{alpha:.4}  {e3:.6}  {e2:.6}   ({n3:.6}, {n2:.6})");
    }
    Ok(())
}
