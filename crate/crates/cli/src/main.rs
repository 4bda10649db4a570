fn main() {
    std::process::exit(cuspsum::run(std::env::args_os()));
}
