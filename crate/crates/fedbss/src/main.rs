use std::process::exit;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FEDBSS_LOG", "info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    exit(fedbss::cli::run_cli(std::env::args()));
}
