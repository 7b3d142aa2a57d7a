fn main() {
    std::process::exit(aspectmine_triage::cli::run(std::env::args_os()));
}
