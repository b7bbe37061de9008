fn main() -> std::process::ExitCode {
    belltide::cli::run(std::env::args_os())
}
