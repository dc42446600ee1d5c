fn main() {
    std::process::exit(spherical_reals::cli::run(std::env::args_os()));
}
