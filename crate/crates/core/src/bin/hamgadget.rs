fn main() {
    std::process::exit(hamgadget::cli::run(std::env::args_os()));
}
