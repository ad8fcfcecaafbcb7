use clap::Parser;
use meshsal::cli::{run, Cli};

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let code = std::panic::catch_unwind(|| run(cli)).unwrap_or(3);
    std::process::exit(code);
}
