use std::process::ExitCode;

use rdlab::runner::{exit_code_for, parse_config, run};

const USAGE: &str = "usage: rdlab <scenario.toml>

Runs the scenario described by the file. The `mode` key selects what runs:
simulate, lab-beta, lab-k1, lab-ckp, equilibrium, or validate.
Exit codes: 0 success, 2 config error, 3 numerical failure,
4 validate-mode check failure.";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 2 || args[1] == "-h" || args[1] == "--help" {
        eprintln!("{USAGE}");
        return ExitCode::from(if args.len() == 2 { 0 } else { 2 });
    }
    let text = match std::fs::read_to_string(&args[1]) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args[1]);
            return ExitCode::from(2);
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
