fn main() {
    std::process::exit(jc_cli::run(std::env::args_os()));
}
