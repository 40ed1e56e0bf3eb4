fn main() {
    std::process::exit(pdm_susy::cli::main());
}
