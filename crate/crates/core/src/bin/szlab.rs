fn main() {
    let code =
        szlab::cli::main_with_args(std::env::args_os().collect(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
