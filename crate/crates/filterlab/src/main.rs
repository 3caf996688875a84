use clap::Parser;

fn main() {
    let cli = filterlab::cli::Cli::parse();
    std::process::exit(filterlab::cli::main_entry(cli));
}
