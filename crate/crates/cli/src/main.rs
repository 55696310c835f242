use std::io::Write;

use clap::Parser;

use tablelock_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let result = run(&cli);
    // A closed pipe (say, output sent to `head`) is not worth a panic.
    let _ = if cli.json {
        let text = serde_json::to_string_pretty(&result.report).expect("report serializes");
        writeln!(std::io::stdout(), "{text}")
    } else if result.exit_code >= 2 {
        write!(std::io::stderr(), "{}", result.human_text)
    } else {
        write!(std::io::stdout(), "{}", result.human_text)
    };
    std::process::exit(result.exit_code);
}
