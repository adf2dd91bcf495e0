use std::process::ExitCode;

use clap::Parser;
use cw_chaos::cli::{run, RunConfig};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let config = RunConfig::parse();
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::from(1)
        }
    }
}
