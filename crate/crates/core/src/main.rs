fn main() {
    std::process::exit(gramsey::cli::run(std::env::args_os()));
}
