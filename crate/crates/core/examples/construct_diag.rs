//! Scratch diagnostic: hierarchical window recipe, minors-only margins.
use matconvex::criteria::{derivative_matrix, psd_test, MatrixKind, DEFAULT_PSD_TOL};
use matconvex::expr::FunctionSpec;
use matconvex::interval::Interval;

fn probe(c: Vec<f64>, n: usize, concave: bool) -> (f64, f64) {
    let interval = Interval::open(-1.0, 1.0).unwrap();
    let f = FunctionSpec::polynomial(c.clone(), interval);
    let curv = if concave {
        FunctionSpec::polynomial(c.iter().map(|x| -x).collect(), interval)
    } else {
        f.clone()
    };
    let mut worst_d: f64 = f64::INFINITY;
    let mut worst_k: f64 = f64::INFINITY;
    for t in interval.interior_grid(129) {
        let dm = psd_test(&derivative_matrix(&f, t, n, MatrixKind::Monotone).unwrap(), DEFAULT_PSD_TOL);
        let km = psd_test(&derivative_matrix(&curv, t, n, MatrixKind::Convex).unwrap(), DEFAULT_PSD_TOL);
        worst_d = worst_d.min(dm.minors.iter().cloned().fold(f64::INFINITY, f64::min) / dm.tolerance - 1.0);
        worst_k = worst_k.min(km.minors.iter().cloned().fold(f64::INFINITY, f64::min) / km.tolerance - 1.0);
    }
    (worst_d, worst_k)
}

fn hierarchical(n: usize, m: usize, hw: f64, gamma: f64, theta: f64, scale: f64, concave: bool) -> Vec<f64> {
    let top = 2 * n - 1;
    let mut r = vec![0.0; 2 * n];
    r[top] = 0.2 * theta / ((top + 1) as f64 * hw);
    for k in (1..top).rev() {
        r[k] = r[k + 1] / gamma;
    }
    let mut mag = vec![0.0; m + 1];
    mag[1] = 1.0;
    for k in 2..=(2 * n).min(m) {
        mag[k] = mag[k - 1] * r[k - 1];
    }
    for k in (2 * n + 1)..=m {
        mag[k] = mag[k - 1] * 0.02 / hw;
    }
    let mut c = vec![0.0; m + 1];
    for k in 1..=m {
        let sign = if concave && k % 2 == 0 { -1.0 } else { 1.0 };
        c[k] = sign * mag[k] * scale;
    }
    c
}

fn main() {
    for (n, m) in [(3usize, 6usize), (3, 8), (4, 8), (4, 12)] {
        for gamma in [8.0, 12.0, 20.0, 35.0] {
            for scale in [1.0, 1e4, 1e8, 1e12] {
                let c = hierarchical(n, m, 1.0, gamma, 0.8, scale, false);
                let (d, k) = probe(c, n, false);
                println!("n={n} m={m} gamma={gamma} scale={scale:.0e}: dobsch {d:+.2e} kraus {k:+.2e}");
            }
        }
        println!();
    }
}
