fn main() {
    std::process::exit(remo_cli::main_with(std::env::args_os().collect()));
}
