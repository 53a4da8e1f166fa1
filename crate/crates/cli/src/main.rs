use clap::Parser;

fn main() {
    let cli = pfam_cli::Cli::parse();
    std::process::exit(pfam_cli::main_with(cli));
}
