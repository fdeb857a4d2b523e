use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use confmass::config::Config;
use confmass::report::Format;
use confmass::suites;

/// Desk-scale checks of conformal deformations, constraint quantities,
/// and mass integrals on asymptotically flat and hyperbolic ends.
#[derive(Parser)]
#[command(name = "confmass", disable_help_subcommand = true)]
struct Cli {
    /// One of: af-mass, ah-mass, constraints, verify, validate. Must
    /// match the "command" entry of the configuration file.
    command: String,
    /// Path to the JSON configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the rendered report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
}

fn run(cli: &Cli) -> Result<i32, confmass::Error> {
    let format: Format = cli.format.parse()?;
    let cfg = Config::load(&cli.config)?;
    if cli.command != cfg.command {
        return Err(confmass::Error::Usage(format!(
            "command line says {:?} but the configuration says {:?}",
            cli.command, cfg.command
        )));
    }
    let (report, code) = suites::execute(&cfg)?;
    let rendered = report.render(format)?;
    match &cli.out {
        Some(path) => {
            std::fs::write(path, rendered)?;
            print!("{}", report.console_lines());
        }
        None => print!("{rendered}"),
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help and --version as "errors" with exit 0
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
