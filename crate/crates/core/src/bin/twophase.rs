fn main() -> std::process::ExitCode {
    twophase::cli::main()
}
