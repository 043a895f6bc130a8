use std::io;

fn main() {
    let code = cayley_cli::run(
        std::env::args_os(),
        &mut io::stdin(),
        &mut io::stdout(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
