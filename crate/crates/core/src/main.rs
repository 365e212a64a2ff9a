fn main() {
    std::process::exit(picknorm::cli::run(std::env::args_os()));
}
