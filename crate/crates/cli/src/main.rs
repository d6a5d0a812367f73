use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_mode = std::env::var("CF_MODE").ok();
    let out = coinflip_cli::run(std::env::args_os(), env_mode.as_deref());
    // Ignore broken pipes on output; the exit status still reports the result.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
