use clap::Parser;

use exemplars::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
        eprintln!("{}", serde_json::json!({ "error": chain.join(": ") }));
        std::process::exit(1);
    }
}
