fn main() {
    std::process::exit(nu_metric::cli::run(std::env::args_os()));
}
