use bd_spectra::cli;

fn main() {
    std::process::exit(cli::run());
}
