fn main() {
    // Dying quietly on a closed pipe is the expected behavior for a batch
    // tool; the runtime's default of ignoring SIGPIPE would turn it into a
    // panic mid-report.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if let Err(e) = sceff_cli::run(std::env::args()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
