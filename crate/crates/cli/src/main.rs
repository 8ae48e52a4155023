use clap::Parser;
use rwrs_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse(); // clap exits 2 on flag errors
    match execute(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("rwrs: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
