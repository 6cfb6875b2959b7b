fn main() {
    std::process::exit(sharpbe::cli::run(std::env::args_os()));
}
