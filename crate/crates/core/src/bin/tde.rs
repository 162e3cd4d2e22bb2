fn main() {
    let code = tde::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
