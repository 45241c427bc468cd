fn main() {
    std::process::exit(mwu_lp::cli::run(std::env::args_os()));
}
