fn main() {
    std::process::exit(sisodet_sim::cli::run(std::env::args_os()));
}
