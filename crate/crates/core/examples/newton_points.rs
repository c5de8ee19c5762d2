//! Newton points and σ-supports of short elements.

use parahoric::ekor::{newton_point, sigma_support};
use parahoric::weyl::{elements_up_to, Coweight, Element};

fn main() {
    for w in elements_up_to(3, 1) {
        let supp = sigma_support(&w);
        println!(
            "{:<14} newton {:<12} σ-support {} finite {}",
            w.word_string(),
            newton_point(&w).unwrap().to_string(),
            supp.reflections,
            supp.is_finite
        );
    }
    let t = Element::translation_by(Coweight::from_doubled(2, 0)).unwrap();
    println!(
        "t(1, 0) = {}: newton {}",
        t.word_string(),
        newton_point(&t).unwrap()
    );
}
