use clap::Parser;

use mixlap_tool::config::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(threads) = std::env::var("MIXLAP_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global()
                .ok();
        }
    }
    let cli = Cli::parse();
    std::process::exit(mixlap_tool::run(cli));
}
