//! Base points of every stratum and their retained web pairs.
//!
//! `cargo run --example lattice_web -- 4` searches over `F_81`.

use parahoric::lattice::{
    enumerate_web, find_base_points, partner_report, spin_index, Model, SearchConfig, Side, Stratum,
};

fn main() {
    let j: u32 = std::env::args().nth(1).map_or(2, |s| s.parse().unwrap());
    let model = Model::new(3, j).unwrap();
    println!("Q = {}", model.q());
    for stratum in Stratum::INNER {
        let points = match find_base_points(&model, stratum, &SearchConfig::default()) {
            Ok(p) => p,
            Err(e) => {
                println!("{stratum}: {e}");
                continue;
            }
        };
        let m = &points[0];
        let web = enumerate_web(&model, m).unwrap();
        let s = partner_report(&web, Side::S);
        let t = partner_report(&web, Side::T);
        println!(
            "{stratum}: {}  pairs {} (expected {})  certified {}  spin {}",
            model.describe(m),
            web.count(),
            stratum.expected_web_count(model.q()).unwrap(),
            web.all_certified(),
            spin_index(&model, m).unwrap()
        );
        println!(
            "  S candidates with several partners {:?}, T candidates {:?}",
            s.multiple, t.multiple
        );
    }
}
