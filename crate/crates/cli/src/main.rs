fn main() {
    std::process::exit(sdnse::run(std::env::args_os()));
}
