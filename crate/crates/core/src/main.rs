fn main() {
    std::process::exit(frame_complete::cli::run(std::env::args_os()));
}
