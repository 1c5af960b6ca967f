use clap::Parser;

use scenery::cli::{run, Args, RunConfig};

fn main() {
    let args = Args::parse();
    let outcome = RunConfig::from_args(args).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(outcome) => {
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            if !outcome.summary.is_empty() {
                println!("{}", outcome.summary);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
