fn main() {
    std::process::exit(iwasawa_cli::app::dispatch(std::env::args_os()));
}
