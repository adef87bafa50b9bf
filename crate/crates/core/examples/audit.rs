//! Inequality audit over random pure states.

use kway_negativity::audit::run_audit;

fn main() -> kway_negativity::Result<()> {
    for qubits in [3, 4] {
        let s = run_audit(2000, 7, qubits)?;
        println!("{qubits} qubits: {s:#?}");
    }
    Ok(())
}
