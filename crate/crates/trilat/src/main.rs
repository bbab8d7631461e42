use clap::Parser;

fn main() {
    let cli = trilat::cli::Cli::parse();
    std::process::exit(trilat::cli::run(cli));
}
