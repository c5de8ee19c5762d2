//! `Σ_K` on every basic Iwahori element, the resulting fibers, and the
//! score of each convention against the paramodular reference data.

use parahoric::conformance::fiber_rows;
use parahoric::ekor::{admissible_set, calibrate, FiberRelation, GeneratorSet};
use parahoric::golden;
use parahoric::weyl::sorted_for_display;

fn main() {
    let adm = admissible_set(golden::MU).unwrap();
    let calibration = calibrate(&adm, &golden::paramodular_anchors());
    for s in &calibration.scores {
        println!("{:<26} score {}", s.convention.to_string(), s.score);
    }
    let convention = calibration.chosen;
    for level in [GeneratorSet::paramodular(), GeneratorSet::siegel()] {
        let relation = FiberRelation::compute(&adm, level, convention);
        println!("\nlevel {level} under {convention}");
        for w in sorted_for_display(relation.sigma.keys().copied()) {
            match &relation.sigma[&w] {
                Ok(v) => {
                    let words: Vec<String> = v.iter().map(|x| x.word_string()).collect();
                    println!("  Σ({}) = {{{}}}", w.word_string(), words.join(", "));
                }
                Err(e) => println!("  Σ({}) failed: {e}", w.word_string()),
            }
        }
        for (target, fiber) in fiber_rows(&relation) {
            println!("  {target} <- {{{}}}", fiber.join(", "));
        }
        if let Err(e) = relation.as_map() {
            println!("  not a map: {e}");
        }
    }
}
