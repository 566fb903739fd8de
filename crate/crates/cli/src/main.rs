fn main() {
    std::process::exit(proxauth_cli::main_exit_code());
}
