use clap::Parser;
use dce_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.text);
            for f in &report.files {
                println!("{}", f.display());
            }
        }
        Err(e) => {
            eprintln!("dce: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
