fn main() {
    std::process::exit(lirf::cli::run(std::env::args_os()));
}
