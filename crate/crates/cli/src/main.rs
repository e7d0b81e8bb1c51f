use clap::Parser;

fn main() {
    std::process::exit(optwin_cli::run(optwin_cli::Cli::parse()));
}
