use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hott_cli::{run, Cli, Exit};
use serde_json::json;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit();
        }
        Err(e) => {
            let _ = e.print();
            let err = json!({ "error": { "kind": "usage", "message": e.kind().to_string() } });
            eprintln!("{err}");
            return ExitCode::from(Exit::Usage as u8);
        }
    };
    match run(&cli) {
        Ok(r) => {
            println!("{}", r.render(cli.format));
            ExitCode::from(r.exit as u8)
        }
        Err(e) => {
            let err = e.to_json();
            match cli.format {
                hott_cli::Format::Json => println!("{}", serde_json::to_string_pretty(&err).expect("json")),
                hott_cli::Format::Text => eprintln!("error[{}]: {e}", e.kind()),
            }
            eprintln!("{err}");
            ExitCode::from(e.exit() as u8)
        }
    }
}
