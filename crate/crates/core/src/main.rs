fn main() {
    std::process::exit(cluster4::cli::run(std::env::args_os()));
}
