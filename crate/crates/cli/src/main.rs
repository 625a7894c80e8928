use clap::Parser;

fn main() {
    let cli = synthfridge::Cli::parse();
    if let Err(e) = synthfridge::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
