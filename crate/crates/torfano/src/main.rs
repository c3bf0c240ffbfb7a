use std::io::Write;

fn main() {
    let o = torfano::cli::run(std::env::args_os().skip(1));
    print!("{}", o.stdout);
    eprint!("{}", o.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(o.code);
}
