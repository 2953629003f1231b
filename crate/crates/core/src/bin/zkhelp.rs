fn main() {
    std::process::exit(zkhelp::cli::run_with_args(std::env::args_os()));
}
