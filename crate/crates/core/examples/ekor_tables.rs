//! EKOR index sets at the Iwahori, paramodular and Siegel levels.

use parahoric::ekor::{admissible_set, calibrate, ekor_set, GeneratorSet};
use parahoric::golden;

fn main() {
    let adm = admissible_set(golden::MU).unwrap();
    let convention = calibrate(&adm, &golden::paramodular_anchors()).chosen;
    println!("convention {convention}");
    for (name, level) in [
        ("iwahori", GeneratorSet::iwahori()),
        ("paramodular", GeneratorSet::paramodular()),
        ("siegel", GeneratorSet::siegel()),
    ] {
        let set = ekor_set(&adm, level, true, convention.coset);
        let words: Vec<String> = set.sorted().iter().map(|w| w.word_string()).collect();
        println!("{name} {level}: {} elements", words.len());
        println!("  {}", words.join(", "));
    }
}
