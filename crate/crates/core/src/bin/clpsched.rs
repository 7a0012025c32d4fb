fn main() {
    std::process::exit(clpsched::cli::run(std::env::args_os()));
}
