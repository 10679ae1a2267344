use std::io::Read;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mut stdin = std::io::stdin().lock();
    let code = anchorlab::cli::main_with(args, &mut stdin as &mut dyn Read);
    std::process::exit(code);
}
