//! Parse a system file and print it back in canonical form.
use koopman::sysparse::{parse_system, print_system};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ex1.sys").into());
    let text = std::fs::read_to_string(&path).expect("readable system file");
    match parse_system(&text) {
        Ok(spec) => {
            print!("{}", print_system(&spec));
            println!("initial conditions: {}", spec.ics.len());
        }
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    }
}
