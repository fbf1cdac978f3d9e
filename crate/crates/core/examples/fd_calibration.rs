//! Scratch calibration: FD-oracle error with singularity-scaled steps.
use matconvex::jet::{derivative, finite_difference_oracle};
use matconvex::parse::parse;

fn main() {
    // (text, singularity scale at t)
    let suite: [(&str, fn(f64) -> f64); 8] = [
        ("poly[0,0,1] on (0.1,4)", |_| 1.0),
        ("poly[0,0,0,1] on (0.1,4)", |_| 1.0),
        ("x^0.5 on (0.1,4)", |t| t),
        ("1 / x on (0.1,4)", |t| t),
        ("log(1+x) on (0.1,4)", |t| 1.0 + t),
        ("exp(x) on (0.1,4)", |_| 1.0),
        ("x / (1 + x) on (0.1,4)", |t| 1.0 + t),
        ("x - log(1+x) on (0.1,4)", |t| 1.0 + t),
    ];
    let base = [2e-3, 2e-3, 5e-3, 1e-2, 2e-2, 4e-2, 6e-2];
    let mults = [0.5, 0.75, 1.0, 1.5, 2.0];
    for (text, scale) in suite {
        let f = parse(text).unwrap();
        let lo = 0.1 + 0.35;
        let hi = 4.0 - 0.35;
        let pts: Vec<f64> = (0..25).map(|i| lo + (hi - lo) * i as f64 / 24.0).collect();
        for k in 1..=6usize {
            let mut best = (f64::INFINITY, 0.0);
            for &mult in &mults {
                let mut worst = 0.0f64;
                for &t in &pts {
                    let room = 0.9 * (4.0 - t).min(t - 0.1) / (0.5 * k as f64 + 1.0);
                    let h = (base[k] * mult * scale(t)).min(room);
                    let d = derivative(&f, t, k).unwrap();
                    let fd = finite_difference_oracle(&f, t, k, h).unwrap();
                    let rel = (d - fd).abs() / d.abs().max(1.0);
                    worst = worst.max(rel);
                }
                if worst < best.0 {
                    best = (worst, mult);
                }
            }
            println!("{text:28} k={k}  mult={:.2}  max_rel={:.2e}", best.1, best.0);
        }
    }
}
