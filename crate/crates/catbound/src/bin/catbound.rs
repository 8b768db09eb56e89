use clap::Parser;

use catbound::cli;

fn main() {
    let parsed = cli::Cli::parse();
    match cli::run(parsed) {
        Ok(outcome) => {
            if let Err(err) = cli::deliver(&outcome) {
                eprintln!("error: {err}");
                std::process::exit(2);
            }
            std::process::exit(outcome.exit_code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(cli::error_exit_code(&err));
        }
    }
}
