fn main() {
    std::process::exit(javalite::cli_main(std::env::args_os()));
}
