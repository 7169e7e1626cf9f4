use clap::Parser;

fn main() {
    let cli = uavnoma::cli::Cli::parse();
    std::process::exit(uavnoma::cli::main_with(cli));
}
