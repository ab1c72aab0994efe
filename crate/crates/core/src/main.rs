fn main() -> std::process::ExitCode {
    projrk::cli::main()
}
