fn main() {
    let code = spd_raga::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
