fn main() {
    std::process::exit(divsum_l1::cli::main_with_env());
}
