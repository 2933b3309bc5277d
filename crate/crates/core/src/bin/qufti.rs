fn main() {
    std::process::exit(qufti::cli::run(std::env::args_os()));
}
