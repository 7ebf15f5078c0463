fn main() -> std::process::ExitCode {
    tpwalk::cli::main()
}
