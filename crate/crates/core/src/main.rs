use std::io;

use rdfstar2pg::cli;

fn main() {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = {
        let mut io = cli::Io {
            stdin: &mut stdin.lock(),
            stdout: &mut stdout.lock(),
            stderr: &mut stderr.lock(),
            color: cli::color_enabled(),
        };
        cli::run(std::env::args_os(), &mut io)
    };
    std::process::exit(code);
}
