fn main() {
    std::process::exit(steering_core::cli::run(std::env::args_os()));
}
