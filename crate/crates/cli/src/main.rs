fn main() {
    std::process::exit(surveyerr_cli::run(std::env::args_os()));
}
