fn main() {
    skylattice::cli::init_threads();
    let code = skylattice::cli::run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
