fn main() {
    let code = svdmark::cli::run(std::env::args_os());
    std::process::exit(code);
}
