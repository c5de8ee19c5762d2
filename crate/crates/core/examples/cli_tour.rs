//! Drives the command-line front end in-process.

use std::io;

fn main() {
    let commands: [&[&str]; 4] = [
        &["ekor", "--level", "paramodular"],
        &["sigma-k", "--w", "s0 s1 t", "--K", "s0,s2"],
        &["closure", "--w", "s0 s1 s0 t"],
        &["newton", "--w", "s0 s1 s0 t", "--format", "json"],
    ];
    for args in commands {
        println!("$ parahoric {}", args.join(" "));
        let argv = std::iter::once("parahoric").chain(args.iter().copied());
        let code = parahoric::cli::run(argv, &mut io::stdout(), &mut io::stderr());
        println!("(exit {code})\n");
    }
}
