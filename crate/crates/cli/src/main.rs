use clap::Parser;
use da3_cli::{resolve, threads_from_env, write_outputs, CliError, Cli};
use std::process::ExitCode;
use std::time::Instant;

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let (cmd, flags) = cli.command.parts();
    let cfg = resolve(cmd, flags)?;
    let start = Instant::now();
    let out = cmd.run(&cfg)?;
    eprintln!(
        "{} {}: {:?} in {:.3}s",
        cmd.name(),
        cfg.k,
        out.report.status,
        start.elapsed().as_secs_f64()
    );
    write_outputs(&out)?;
    Ok(out.report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
