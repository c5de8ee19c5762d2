//! The admissible set for `μ = (1/2, 1/2)` with lengths and basic flags.

use parahoric::ekor::{admissible_set, is_basic, newton_point};
use parahoric::golden::MU;

fn main() {
    let adm = admissible_set(MU).unwrap();
    println!("|Adm({MU})| = {}", adm.len());
    for w in adm.sorted() {
        println!(
            "{:<12} len {}  basic {:<5}  newton {}",
            w.word_string(),
            w.length(),
            is_basic(&w),
            newton_point(&w).unwrap()
        );
    }
    let maximal = parahoric::ekor::AdmissibleSet::maximal_elements(MU).unwrap();
    let words: Vec<String> = maximal.iter().map(|w| w.word_string()).collect();
    println!("maximal: {}", words.join(", "));
}
