fn main() {
    std::process::exit(meander_core::cli::run(std::env::args_os()));
}
