use clap::Parser;
use streetris_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            for line in summary {
                if cli.out.is_some() {
                    println!("{line}");
                } else {
                    eprintln!("{line}");
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
