fn main() {
    let outcome = pipemap::cli::run(std::env::args_os());
    if outcome.exit_code == 0 {
        print!("{}", outcome.report);
    } else {
        eprint!("{}", outcome.report);
    }
    std::process::exit(outcome.exit_code);
}
