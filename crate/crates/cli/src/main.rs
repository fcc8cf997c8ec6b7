use clap::Parser;
use coarsegeo_cli::{run, Cli};

fn main() {
    match run(Cli::parse()) {
        Ok(out) => {
            if !out.stdout.is_empty() {
                println!("{}", out.stdout);
            }
            if let Some(f) = out.failure {
                eprintln!("error: {f}");
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
