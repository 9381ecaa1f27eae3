use clap::Parser;

fn main() {
    let cli = qfim_dim_cli::Cli::parse();
    std::process::exit(qfim_dim_cli::main_with(cli));
}
