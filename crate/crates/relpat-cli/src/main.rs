use clap::Parser;

fn main() {
    let cli = relpat_cli::Cli::parse();
    let outcome = relpat_cli::run(cli);
    if !outcome.stdout.is_empty() {
        println!("{}", outcome.stdout);
    }
    if !outcome.stderr.is_empty() {
        eprintln!("{}", outcome.stderr);
    }
    std::process::exit(outcome.code);
}
