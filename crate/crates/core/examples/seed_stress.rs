//! Scratch: seed-robustness of the seeded acceptance criteria.
use matconvex::selftest::*;

fn main() {
    let mut bad = 0;
    for seed in 0..30u64 {
        let cfg = SelftestConfig::with_seed(seed * 7919 + 13);
        for c in [
            criterion_02_closed_forms(&cfg),
            criterion_03_cross_criterion(&cfg),
            criterion_08_perturbation(&cfg),
            criterion_09_constructions(&cfg),
            criterion_10_gap_search(&cfg),
        ] {
            if !c.passed {
                bad += 1;
                println!("seed {} criterion {:02}: {}", cfg.seed, c.id, c.detail);
            }
        }
    }
    println!("done, {bad} failures");
}
