fn main() {
    std::process::exit(survey_ecdf::cli::run(std::env::args_os()));
}
