fn main() {
    std::process::exit(drinfeld_cli::run(std::env::args_os()));
}
