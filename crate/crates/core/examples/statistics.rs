//! Rank-sum test and effect size between two samples.

use mutsel::eval::{vargha_delaney_a12, wilcoxon_ranksum};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let a = [0.91, 0.88, 0.95, 0.97, 0.90, 0.93, 0.89];
    let b = [0.71, 0.80, 0.90, 0.65, 0.77, 0.84, 0.69, 0.73];
    let t = wilcoxon_ranksum(&a, &b);
    Ok(format!(
        "W = {}, p = {:.5} ({:?}), A12 = {:.3}\n",
        t.w,
        t.p,
        t.method,
        vargha_delaney_a12(&a, &b)
    ))
}

fn main() {
    print!("{}", run_example().unwrap());
}
