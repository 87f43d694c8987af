mod cli;

fn main() -> ! {
    // Die quietly on closed pipes (e.g. piping reports into `head`)
    // instead of panicking on the failed print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    cli::main()
}
