use std::io::IsTerminal;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // one-shot commands keep stderr for their JSON error report
    let default = if args.get(1).map(String::as_str) == Some("serve") { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| default.into()),
        )
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .init();
    std::process::exit(podium_service::cli::main_with_args(args));
}
