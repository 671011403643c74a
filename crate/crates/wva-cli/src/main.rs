use clap::Parser;

use wva_cli::args::{Cli, Command};
use wva_cli::commands;

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Curves(a) => commands::curves::run(a),
        Command::Qfi(a) => commands::qfi::run(a),
        Command::Nonlinearity(a) => commands::nonlinearity::run(a),
        Command::Compare(a) => commands::compare::run(a),
        Command::Servo(a) => commands::servo::run(a),
    };
    match result {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
        }
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}
