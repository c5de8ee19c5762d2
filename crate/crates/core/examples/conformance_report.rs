//! Full conformance run, printed as a status summary.

use parahoric::conformance::{run, ConformanceOptions};

fn main() {
    let report = run(&ConformanceOptions::default()).expect("lattice search");
    println!(
        "convention {} (score {})",
        report.convention, report.calibration.max_score
    );
    for (name, status) in report.statuses() {
        println!("{status:?}\t{name}");
    }
    if let Some(lattice) = &report.lattice {
        for c in &lattice.counts {
            println!(
                "{}\tQ={}\t{:?}\tcount={:?}\texpected={}\twidened_from={:?}",
                c.stratum, c.q, c.status, c.count, c.expected, c.widened_from
            );
        }
    }
    println!("exit {}", report.exit_code);
}
