use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    match emfow_cli::Cli::try_parse() {
        Ok(cli) => std::process::exit(emfow_cli::run(cli)),
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    }
}
