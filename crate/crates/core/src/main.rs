fn main() {
    std::process::exit(ftt_sim::cli::run(std::env::args_os()));
}
