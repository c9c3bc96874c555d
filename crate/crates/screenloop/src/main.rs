use clap::Parser;
use screenloop::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(output) => print!("{output}"),
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(error.exit_code());
        }
    }
}
