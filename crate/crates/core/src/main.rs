fn main() {
    std::process::exit(arraycode::cli::run(std::env::args_os()));
}
