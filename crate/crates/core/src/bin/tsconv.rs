fn main() {
    if let Some(n) = std::env::var("TSCONV_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .expect("global pool is configured once");
    }
    std::process::exit(tsconv::cli::run(std::env::args_os()));
}
