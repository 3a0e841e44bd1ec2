use clap::Parser;
use kahler_verify::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kahler-verify: {e}");
            2
        }
    };
    std::process::exit(code);
}
