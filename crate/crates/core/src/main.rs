fn main() {
    std::process::exit(cobordia::cli::main());
}
