fn main() -> std::process::ExitCode {
    mattekit::cli::main_with(std::env::args_os())
}
