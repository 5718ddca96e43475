use clap::Parser;
use kzb_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli, |k| std::env::var(k).ok()) {
        Ok(out) => {
            print!("{}", out.stdout);
            std::process::exit(out.code);
        }
        Err(e) => {
            eprintln!("kzb: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
