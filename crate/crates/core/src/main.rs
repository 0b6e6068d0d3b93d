fn main() {
    std::process::exit(dmqkd::cli::run(std::env::args_os()));
}
