fn main() {
    std::process::exit(tvadal::cli::run(std::env::args_os()));
}
