fn main() {
    // warnings by default; LLR_LAB_LOG takes env_logger filter syntax (`info`, `off`, ...)
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .parse_env("LLR_LAB_LOG")
        .format_timestamp(None)
        .init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(llr_lab::cli::main_with_args(&args));
}
