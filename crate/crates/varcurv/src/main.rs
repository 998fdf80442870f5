fn main() {
    std::process::exit(varcurv::run_cli());
}
