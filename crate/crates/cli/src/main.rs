use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let outcome = tanglekit_cli::run(&argv);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stdout.flush();
    let mut stderr = std::io::stderr().lock();
    let _ = stderr.write_all(outcome.stderr.as_bytes());
    let _ = stderr.flush();
    std::process::exit(outcome.code);
}
