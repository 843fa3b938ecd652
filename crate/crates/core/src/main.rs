fn main() {
    std::process::exit(nullcover::cli::run(std::env::args_os()));
}
