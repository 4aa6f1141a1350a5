use clap::Parser;

fn main() {
    std::process::exit(mwc::cli::run(mwc::cli::Cli::parse()));
}
