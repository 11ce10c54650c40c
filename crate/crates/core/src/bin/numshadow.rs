fn main() {
    std::process::exit(numshadow::cli::main());
}
