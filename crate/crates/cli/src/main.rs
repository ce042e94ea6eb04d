use std::process::ExitCode;

use clap::Parser;

use spherelab_cli::{exit_code, run, Cli, RunConfig};

fn write(path: &std::path::Path, text: &str) -> Result<(), ExitCode> {
    std::fs::write(path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        ExitCode::from(spherelab_cli::EXIT_CONFIG as u8)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, density) = match RunConfig::from_cli(cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let outcome = match run(&config, &density) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    match (&config.out, &outcome.obj) {
        (Some(path), Some(obj)) => {
            if let Err(code) = write(path, obj) {
                return code;
            }
            println!("{json}");
            eprintln!("{}", outcome.summary);
        }
        (None, Some(obj)) => {
            print!("{obj}");
            eprintln!("{}", outcome.summary);
        }
        (Some(path), None) => {
            if let Err(code) = write(path, &json) {
                return code;
            }
            println!("{}", outcome.summary);
        }
        (None, None) => {
            println!("{json}");
            eprintln!("{}", outcome.summary);
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
