use clap::Parser;
use pseudolap_cli::{run, Cli};

fn main() {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = pseudolap_cli::CliError::config(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code);
        }
    };
    match run(&cli, &mut std::io::stdout().lock()) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code);
        }
    }
}
