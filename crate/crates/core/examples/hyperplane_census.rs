//! Exhaustive strata of the lattices `t·L₀ ⊂ M ⊂¹ L₀`.
//!
//! `cargo run --release --example hyperplane_census -- 4` includes `F_81`.

use std::time::Instant;

use parahoric::lattice::{hyperplane_census, Model};

fn main() {
    let max_j: u32 = std::env::args().nth(1).map_or(3, |s| s.parse().unwrap());
    for j in 2..=max_j {
        let model = Model::new(3, j).unwrap();
        let start = Instant::now();
        let census = hyperplane_census(&model);
        print!("Q = {}:", model.q());
        for (s, pts) in &census {
            print!(" {s} {}", pts.len());
        }
        println!("  ({:.2?})", start.elapsed());
    }
}
