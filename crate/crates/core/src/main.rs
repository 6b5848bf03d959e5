use std::io::Write;

use coarse_complex::cli;

fn main() {
    cli::configure_threads();
    let out = cli::run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
