use clap::Parser;
use periodpoly_cli::{run, Cli, ExitStatus};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::InputError.code() } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let out = run(cli);
    print!("{}", out.output);
    if let Some(e) = out.error {
        eprintln!("error: {e}");
    }
    std::process::exit(out.status.code());
}
