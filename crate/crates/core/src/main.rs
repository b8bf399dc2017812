fn main() {
    std::process::exit(swapcert::cli::run(std::env::args_os()));
}
