fn main() {
    std::process::exit(graph_smooth::cli::run(std::env::args_os()));
}
