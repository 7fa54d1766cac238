//! Fit a boosted tree classifier and round-trip it through JSON.

use mutsel::gbdt::{train, BoostedModel, GbdtConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..400).map(|_| (0..4).map(|_| rng.gen::<f64>()).collect()).collect();
    let y: Vec<f64> = x.iter().map(|r| f64::from(u8::from(r[0] + 0.5 * r[1] > 0.8))).collect();
    let cfg = GbdtConfig {
        trees: 100,
        depth: 3,
        ..Default::default()
    };
    let (model, report) = train(&x, &y, &cfg, "example")?;
    let correct = x
        .iter()
        .zip(&y)
        .filter(|(r, &t)| (model.predict(r).unwrap() >= 0.5) == (t == 1.0))
        .count();
    let back = BoostedModel::from_json(&model.to_json())?;
    assert_eq!(back, model);
    Ok(format!(
        "loss {:.4} -> {:.4}, training accuracy {:.3}\n",
        report.loss_history[0],
        report.loss_history.last().unwrap(),
        correct as f64 / x.len() as f64
    ))
}

fn main() {
    print!("{}", run_example().unwrap());
}
