fn main() {
    // die quietly when stdout is closed early (e.g. piped into head)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    solvflow::shoot::init_threads();
    std::process::exit(solvflow::cli::run());
}
