use std::io::Write;

fn main() {
    let out = mfef::cli::run(std::env::args_os());
    eprint!("{}", out.stderr);
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
