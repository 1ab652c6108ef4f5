use clap::Parser;

fn main() {
    let cli = mpcheck::cli::Cli::parse();
    std::process::exit(mpcheck::cli::run(cli) as i32);
}
