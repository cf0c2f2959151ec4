use clap::Parser;
use ffanalytica_cli::{run, Cli, ExperimentConfig};

fn main() {
    let cli = Cli::parse();
    let code = match ExperimentConfig::from_cli(cli).and_then(|cfg| run(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ffanalytica: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
