fn main() {
    std::process::exit(rosenthal::cli::run(std::env::args_os()));
}
