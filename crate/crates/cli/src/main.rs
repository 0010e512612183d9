use std::path::PathBuf;

fn main() {
    let env_catalog = std::env::var_os("SPDC_CATALOG").map(PathBuf::from);
    let code = spdc_design_cli::run(
        std::env::args_os(),
        env_catalog,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
