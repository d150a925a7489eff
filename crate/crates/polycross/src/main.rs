fn main() {
    std::process::exit(polycross::cli::run(std::env::args_os()));
}
