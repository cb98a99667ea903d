fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(pp_stability_lab::run::main_with_args(&args));
}
