fn main() {
    std::process::exit(fpr_consensus::cli::dispatch(std::env::args_os()));
}
