fn main() {
    std::process::exit(rto_sim::cli::main_with_args(std::env::args_os()));
}
