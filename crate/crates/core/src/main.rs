fn main() {
    env_logger::init();
    std::process::exit(biphoton::cli::run(std::env::args_os()));
}
