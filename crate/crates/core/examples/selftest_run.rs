//! Scratch: run the acceptance checks and print outcomes.
use matconvex::selftest::{run_all, SelftestConfig};

fn main() {
    let t0 = std::time::Instant::now();
    for c in run_all(&SelftestConfig::default()) {
        println!(
            "criterion {:02} {:50} {}  [{}]",
            c.id,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    println!("total {:.1}s", t0.elapsed().as_secs_f64());
}
