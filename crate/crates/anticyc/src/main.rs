fn main() {
    std::process::exit(anticyc::cli::main());
}
