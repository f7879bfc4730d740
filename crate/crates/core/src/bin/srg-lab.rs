fn main() {
    std::process::exit(srg_core::cli::run(std::env::args_os()));
}
