fn main() -> std::process::ExitCode {
    pr_markov::cli::main()
}
