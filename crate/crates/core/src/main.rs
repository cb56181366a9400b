use clap::Parser;

use membrane::cli::{execute, CliConfig, Io};

fn main() {
    let cfg = CliConfig::parse();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = execute(&cfg, &mut Io { out: &mut out, err: &mut err });
    std::process::exit(code);
}
