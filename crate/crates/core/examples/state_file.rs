//! Write a state file, read it back and print the report as JSON.

use kway_negativity::cli::analyze;
use kway_negativity::io::{emit_json, state_file_json, StateInput};
use kway_negativity::state::PureState;

fn main() -> kway_negativity::Result<()> {
    let text = state_file_json(&StateInput::Pure(PureState::w(3)));
    println!("{text}");
    let doc = analyze(&text, None, true)?;
    print!("{}", emit_json(&doc)?);
    Ok(())
}
