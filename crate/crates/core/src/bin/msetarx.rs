fn main() {
    std::process::exit(msetarx::cli::run_command(std::env::args_os()));
}
