//! Leading-digit test on genuine-looking and fabricated amounts.

use dqaudit::analytics::benford;
use dqaudit::model::{CellValue, Column};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let natural: Vec<CellValue> = (0..5000)
        .map(|_| {
            let v = 10f64.powf(rng.gen_range(1.0..5.0));
            CellValue::Number(Decimal::from_f64_retain(v).unwrap().round_dp(2))
        })
        .collect();
    let invented: Vec<CellValue> = (0..5000)
        .map(|_| CellValue::number(rng.gen_range(1000..10_000)))
        .collect();

    for (name, cells) in [("natural", natural), ("invented", invented)] {
        let r = benford(&Column::new(name, cells), 100).unwrap();
        println!(
            "{name}: chi-square {:.2}, MAD {:.4}, flagged {}",
            r.chi_square, r.mad, r.flagged
        );
        for d in 1..=9 {
            println!(
                "  {d}: {:.3} (expected {:.3})",
                r.proportion(d),
                r.expected[d - 1]
            );
        }
    }
}
