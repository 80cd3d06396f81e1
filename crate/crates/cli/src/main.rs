use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let run = primeud_cli::execute(&argv);
    std::io::stdout().write_all(run.stdout.as_bytes()).ok();
    std::io::stderr().write_all(run.stderr.as_bytes()).ok();
    std::process::exit(run.code);
}
