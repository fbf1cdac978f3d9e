//! The definitional side: Hermitian functional calculus `f(A)`, random
//! matrices with prescribed spectra, and seeded counterexample search for the
//! matrix-order definitions of monotonicity and convexity.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::criteria::MatrixKind;
use crate::error::{Error, Result};
use crate::expr::FunctionSpec;
use crate::interval::{Interval, INTERIOR_MARGIN};

/// Default total width of the spectrum window used when a function's domain
/// is unbounded.
pub const DEFAULT_SPECTRUM_WINDOW: f64 = 4.0;

/// Relative scale for gap verdicts: a gap eigenvalue below
/// `-GAP_TOL * (1 + |gap|)` counts as a refutation.
pub const GAP_TOL: f64 = 1e-8;

const MAX_DIM: usize = 8;

/// A dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validates conjugate symmetry to 1e-12 relative to the matrix scale.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Precondition(format!(
                "expected {} entries for dim {dim}",
                dim * dim
            )));
        }
        let scale = entries.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        for i in 0..dim {
            for j in 0..dim {
                let d = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                if d > 1e-12 * scale {
                    return Err(Error::Precondition(format!(
                        "matrix is not Hermitian: asymmetry {d:e} at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    fn from_parts(dim: usize, entries: Vec<Complex64>) -> Self {
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Max entry magnitude.
    pub fn inf_norm(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Row-major `[re, im]` pairs, for serialization.
    pub fn to_re_im_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let z = self.entry(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_re_im_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Precondition("ragged matrix rows".into()));
            }
            for z in row {
                entries.push(Complex64::new(z[0], z[1]));
            }
        }
        Self::new(dim, entries)
    }

    fn hermitize(mut self) -> Self {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                let avg = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i].conj());
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg.conj();
            }
            let d = self.entries[i * n + i];
            self.entries[i * n + i] = Complex64::new(d.re, 0.0);
        }
        self
    }

    fn linear_combination(terms: &[(f64, &HermitianMatrix)]) -> Self {
        let dim = terms[0].1.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, m) in terms {
            for (dst, src) in entries.iter_mut().zip(&m.entries) {
                *dst += src * *w;
            }
        }
        Self::from_parts(dim, entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigen_hermitian(self).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Full Hermitian eigendecomposition by cyclic Jacobi with complex rotations.
/// Returns eigenvalues ascending and the matching unitary `U` (row-major,
/// eigenvectors in columns) with `A = U diag(lambda) U*`.
pub fn eigen_hermitian(a: &HermitianMatrix) -> (Vec<f64>, Vec<Complex64>) {
    let n = a.dim;
    let mut m = a.entries.clone();
    let mut u = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        u[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let scale = a.inf_norm().max(1e-300);
    let tol = 1e-14 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q].norm();
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let alpha = m[p * n + p].re;
                let gamma = m[q * n + q].re;
                // Zeroing angle: tan(2 theta) = 2r / (alpha - gamma).
                let two_theta = (2.0 * r).atan2(alpha - gamma);
                let theta = 0.5 * two_theta;
                let c = theta.cos();
                let s = theta.sin() * phase.conj();
                // Column update (right-multiplication by J).
                for i in 0..n {
                    let mp = m[i * n + p];
                    let mq = m[i * n + q];
                    m[i * n + p] = mp * c + mq * s;
                    m[i * n + q] = mp * (-s.conj()) + mq * c;
                }
                // Row update (left-multiplication by J*).
                for j in 0..n {
                    let rp = m[p * n + j];
                    let rq = m[q * n + j];
                    m[p * n + j] = rp * c + rq * s.conj();
                    m[q * n + j] = rp * (-s) + rq * c;
                }
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                m[p * n + p] = Complex64::new(m[p * n + p].re, 0.0);
                m[q * n + q] = Complex64::new(m[q * n + q].re, 0.0);
                for i in 0..n {
                    let up = u[i * n + p];
                    let uq = u[i * n + q];
                    u[i * n + p] = up * c + uq * s;
                    u[i * n + q] = up * (-s.conj()) + uq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_col] = u[i * n + old_col];
        }
    }
    (eigenvalues, vectors)
}

/// `f(A)` by spectral decomposition: `U f(Lambda) U*`.
pub fn apply_function(f: &FunctionSpec, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let (eigenvalues, u) = eigen_hermitian(a);
    for &ev in &eigenvalues {
        if !f.domain.contains_interior(ev) {
            return Err(Error::SpectrumOutOfDomain {
                eigenvalue: ev,
                lo: f.domain.lo(),
                hi: f.domain.hi(),
            });
        }
    }
    let values: Vec<f64> = eigenvalues
        .iter()
        .map(|&ev| f.evaluate(ev))
        .collect::<Result<_>>()?;
    let n = a.dim;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, w) in values.iter().enumerate() {
                acc += u[i * n + k] * u[j * n + k].conj() * *w;
            }
            entries[i * n + j] = acc;
        }
    }
    Ok(HermitianMatrix::from_parts(n, entries).hermitize())
}

/// Jensen gap `lambda f(A) + (1-lambda) f(B) - f(lambda A + (1-lambda) B)`
/// and its minimum eigenvalue. A negative eigenvalue beyond tolerance
/// refutes matrix convexity at this dimension.
pub fn convexity_gap(
    f: &FunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    lambda: f64,
) -> Result<(HermitianMatrix, f64)> {
    if a.dim != b.dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Precondition(format!(
            "lambda must lie in [0,1], got {lambda}"
        )));
    }
    let mix = HermitianMatrix::linear_combination(&[(lambda, a), (1.0 - lambda, b)]).hermitize();
    let fa = apply_function(f, a)?;
    let fb = apply_function(f, b)?;
    let fmix = apply_function(f, &mix)?;
    let gap = HermitianMatrix::linear_combination(&[
        (lambda, &fa),
        (1.0 - lambda, &fb),
        (-1.0, &fmix),
    ])
    .hermitize();
    let min = gap.min_eigenvalue();
    Ok((gap, min))
}

/// Order gap `f(B) - f(A)` for a comparable pair `A <= B` and its minimum
/// eigenvalue.
pub fn monotonicity_gap(
    f: &FunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<(HermitianMatrix, f64)> {
    if a.dim != b.dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    let diff = HermitianMatrix::linear_combination(&[(1.0, b), (-1.0, a)]).hermitize();
    let min_diff = diff.min_eigenvalue();
    if min_diff < -GAP_TOL * (1.0 + diff.inf_norm()) {
        return Err(Error::NotComparable {
            min_eigenvalue: min_diff,
        });
    }
    let fa = apply_function(f, a)?;
    let fb = apply_function(f, b)?;
    let gap = HermitianMatrix::linear_combination(&[(1.0, &fb), (-1.0, &fa)]).hermitize();
    let min = gap.min_eigenvalue();
    Ok((gap, min))
}

// ---------------------------------------------------------------------------
// Random sampling
// ---------------------------------------------------------------------------

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_gauss(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(
        gauss(rng) / std::f64::consts::SQRT_2,
        gauss(rng) / std::f64::consts::SQRT_2,
    )
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix via modified
/// Gram-Schmidt with positive real diagonal of R (the phase fix).
fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut g: Vec<Complex64> = (0..dim * dim).map(|_| complex_gauss(rng)).collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for i in 0..j {
                let mut proj = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    proj += g[k * dim + i].conj() * g[k * dim + j];
                }
                for k in 0..dim {
                    let gi = g[k * dim + i];
                    g[k * dim + j] -= proj * gi;
                }
            }
        }
        let norm: f64 = (0..dim)
            .map(|k| g[k * dim + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        for k in 0..dim {
            g[k * dim + j] /= norm;
        }
    }
    g
}

/// Random Hermitian matrix with eigenvalues drawn uniformly from a compact
/// sub-interval of `interval` (margin-shrunk), conjugated by a Haar unitary.
/// Deterministic for a given RNG state.
pub fn random_hermitian(
    dim: usize,
    interval: &Interval,
    rng: &mut ChaCha8Rng,
) -> Result<HermitianMatrix> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Precondition(format!(
            "dimension must be in 1..={MAX_DIM}, got {dim}"
        )));
    }
    if !interval.is_bounded() {
        return Err(Error::UnboundedInterval);
    }
    let delta = INTERIOR_MARGIN * (interval.hi() - interval.lo());
    let lo = interval.lo() + delta;
    let hi = interval.hi() - delta;
    let eigenvalues: Vec<f64> = (0..dim).map(|_| rng.gen_range(lo..hi)).collect();
    let u = haar_unitary(dim, rng);
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, ev) in eigenvalues.iter().enumerate() {
                acc += u[i * dim + k] * u[j * dim + k].conj() * *ev;
            }
            entries[i * dim + j] = acc;
        }
    }
    Ok(HermitianMatrix::from_parts(dim, entries).hermitize())
}

// ---------------------------------------------------------------------------
// Definitional counterexample search
// ---------------------------------------------------------------------------

/// Concrete refutation data for a definitional test: the pair, the mixing
/// parameter (1 for monotonicity), the most negative gap eigenvalue, and the
/// seed/trial needed to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: MatrixKind,
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub lambda: f64,
    pub gap_min_eigenvalue: f64,
    pub seed: u64,
    pub trial: u64,
}

/// Outcome of [`definitional_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct DefinitionalReport {
    pub kind: MatrixKind,
    pub dim: usize,
    pub trials: u64,
    pub refuted: bool,
    pub witness: Option<Witness>,
    /// Most negative gap eigenvalue observed across all trials.
    pub worst_gap: f64,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sample the trial pair `(A, B, lambda)` for the given kind. For monotone
/// trials `B = A + P` with a PSD bump scaled to keep the spectrum inside the
/// window, so `A <= B` holds by construction.
fn sample_trial(
    kind: MatrixKind,
    dim: usize,
    window: &Interval,
    rng: &mut ChaCha8Rng,
) -> Result<(HermitianMatrix, HermitianMatrix, f64)> {
    match kind {
        MatrixKind::Convex => {
            let a = random_hermitian(dim, window, rng)?;
            let b = random_hermitian(dim, window, rng)?;
            let lambda: f64 = rng.gen_range(0.0..1.0);
            Ok((a, b, lambda))
        }
        MatrixKind::Monotone => {
            let delta = INTERIOR_MARGIN * (window.hi() - window.lo());
            for _retry in 0..100 {
                let a = random_hermitian(dim, window, rng)?;
                let headroom = (window.hi() - delta) - a.eigenvalues()[dim - 1];
                if headroom <= 0.0 {
                    continue;
                }
                let mut g = vec![Complex64::new(0.0, 0.0); dim * dim];
                for z in &mut g {
                    *z = complex_gauss(rng);
                }
                // P = G G* is PSD.
                let mut p = vec![Complex64::new(0.0, 0.0); dim * dim];
                for i in 0..dim {
                    for j in 0..dim {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..dim {
                            acc += g[i * dim + k] * g[j * dim + k].conj();
                        }
                        p[i * dim + j] = acc;
                    }
                }
                let p = HermitianMatrix::from_parts(dim, p).hermitize();
                let p_max = p.eigenvalues()[dim - 1];
                if p_max <= 0.0 {
                    continue;
                }
                let fraction: f64 = rng.gen_range(0.1..1.0);
                let scale = fraction * headroom / p_max;
                let b = HermitianMatrix::linear_combination(&[(1.0, &a), (scale, &p)]).hermitize();
                let evs = b.eigenvalues();
                if evs[0] > window.lo() && evs[dim - 1] < window.hi() {
                    return Ok((a, b, 1.0));
                }
            }
            Err(Error::SearchExhausted {
                attempts: 100,
                diagnostics: "could not sample a comparable pair inside the window".into(),
            })
        }
    }
}

fn trial_gap(
    f: &FunctionSpec,
    kind: MatrixKind,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    lambda: f64,
) -> Result<f64> {
    Ok(match kind {
        MatrixKind::Convex => convexity_gap(f, a, b, lambda)?.1,
        MatrixKind::Monotone => monotonicity_gap(f, a, b)?.1,
    })
}

/// Golden-section refinement of the mixing parameter, keeping the most
/// negative gap eigenvalue encountered.
fn refine_lambda(
    f: &FunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    lambda0: f64,
    gap0: f64,
) -> (f64, f64) {
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = (lambda0, gap0);
    let eval = |lambda: f64, best: &mut (f64, f64)| -> f64 {
        match convexity_gap(f, a, b, lambda) {
            Ok((_, g)) => {
                if g < best.1 {
                    *best = (lambda, g);
                }
                g
            }
            Err(_) => f64::INFINITY,
        }
    };
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = eval(x1, &mut best);
    let mut f2 = eval(x2, &mut best);
    for _ in 0..20 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2, &mut best);
        }
    }
    best
}

/// Run `trials` random definitional tests of the matrix-order property at
/// dimension `n`. Returns REFUTED with the worst witness if any trial's gap
/// has an eigenvalue below `-GAP_TOL * (1 + |gap|)`, else UNREFUTED.
/// Deterministic for a given seed.
pub fn definitional_test(
    f: &FunctionSpec,
    n: usize,
    kind: MatrixKind,
    trials: u64,
    seed: u64,
) -> Result<DefinitionalReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let window = f.domain.truncate_to_window(DEFAULT_SPECTRUM_WINDOW)?;
    let mut worst: Option<(f64, u64, HermitianMatrix, HermitianMatrix, f64)> = None;
    let mut worst_gap = f64::INFINITY;
    let mut refuted = false;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let (a, b, lambda) = sample_trial(kind, n, &window, &mut rng)?;
        let (gap, tol) = {
            let (gap_matrix, gap_min) = match kind {
                MatrixKind::Convex => convexity_gap(f, &a, &b, lambda)?,
                MatrixKind::Monotone => monotonicity_gap(f, &a, &b)?,
            };
            (gap_min, GAP_TOL * (1.0 + gap_matrix.inf_norm()))
        };
        worst_gap = worst_gap.min(gap);
        if gap < -tol {
            refuted = true;
        }
        let replace = match &worst {
            None => true,
            Some((g, ..)) => gap < *g,
        };
        if replace {
            worst = Some((gap, trial, a, b, lambda));
        }
    }
    let witness = if refuted {
        let (gap, trial, a, b, lambda) = worst.expect("at least one trial ran");
        let (lambda, gap) = if kind == MatrixKind::Convex {
            refine_lambda(f, &a, &b, lambda, gap)
        } else {
            (lambda, gap)
        };
        worst_gap = worst_gap.min(gap);
        Some(Witness {
            kind,
            a,
            b,
            lambda,
            gap_min_eigenvalue: gap,
            seed,
            trial,
        })
    } else {
        None
    };
    Ok(DefinitionalReport {
        kind,
        dim: n,
        trials,
        refuted,
        witness,
        worst_gap,
    })
}

/// Recompute a witness's gap eigenvalue from its seed and trial index.
/// Regenerates the pair from the same stream and evaluates the gap at the
/// stored mixing parameter.
pub fn replay_witness(f: &FunctionSpec, w: &Witness) -> Result<f64> {
    let window = f.domain.truncate_to_window(DEFAULT_SPECTRUM_WINDOW)?;
    let mut rng = trial_rng(w.seed, w.trial);
    let (a, b, _) = sample_trial(w.kind, w.a.dim(), &window, &mut rng)?;
    trial_gap(f, w.kind, &a, &b, w.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn eigen_of_diagonal() {
        let a = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        assert_eq!(a.eigenvalues(), vec![1.0, 2.0]);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let mut rng = seeded(11);
        for dim in 1..=5usize {
            let a = random_hermitian(dim, &Interval::open(-2.0, 3.0).unwrap(), &mut rng).unwrap();
            let (evs, u) = eigen_hermitian(&a);
            // U diag U* == A
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = c(0.0, 0.0);
                    for k in 0..dim {
                        acc += u[i * dim + k] * u[j * dim + k].conj() * evs[k];
                    }
                    let d = (acc - a.entry(i, j)).norm();
                    assert!(d < 1e-10, "dim {dim} entry ({i},{j}) off by {d:e}");
                }
            }
            // U unitary
            for p in 0..dim {
                for q in 0..dim {
                    let mut acc = c(0.0, 0.0);
                    for k in 0..dim {
                        acc += u[k * dim + p].conj() * u[k * dim + q];
                    }
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((acc - c(want, 0.0)).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn eigen_complex_pauli_y() {
        // [[0, -i],[i, 0]] has eigenvalues -1, 1.
        let a =
            HermitianMatrix::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
                .unwrap();
        let evs = a.eigenvalues();
        assert_relative_eq!(evs[0], -1.0, max_relative = 1e-12);
        assert_relative_eq!(evs[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn random_spectrum_stays_inside() {
        let window = Interval::open(0.0, 1.0).unwrap();
        let mut rng = seeded(3);
        for _ in 0..20 {
            let a = random_hermitian(2, &window, &mut rng).unwrap();
            for ev in a.eigenvalues() {
                assert!(ev > 0.0 && ev < 1.0, "eigenvalue {ev}");
            }
        }
        let s = random_hermitian(1, &Interval::open(-3.0, -1.0).unwrap(), &mut rng).unwrap();
        let ev = s.eigenvalues()[0];
        assert!(ev > -3.0 && ev < -1.0);
    }

    #[test]
    fn random_hermitian_is_deterministic() {
        let window = Interval::open(0.1, 4.0).unwrap();
        let a = random_hermitian(3, &window, &mut seeded(42)).unwrap();
        let b = random_hermitian(3, &window, &mut seeded(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_hermitian_rejects_unbounded() {
        let mut rng = seeded(0);
        assert!(matches!(
            random_hermitian(2, &Interval::positive_axis(), &mut rng),
            Err(Error::UnboundedInterval)
        ));
    }

    #[test]
    fn apply_square_is_matrix_square() {
        let f = parse("poly[0,0,1] on (-10,10)").unwrap();
        let mut rng = seeded(5);
        let a = random_hermitian(3, &Interval::open(-2.0, 2.0).unwrap(), &mut rng).unwrap();
        let fa = apply_function(&f, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = c(0.0, 0.0);
                for k in 0..3 {
                    acc += a.entry(i, k) * a.entry(k, j);
                }
                assert!((acc - fa.entry(i, j)).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn apply_identity_and_reciprocal() {
        let ident = parse("x on (-10,10)").unwrap();
        let mut rng = seeded(6);
        let a = random_hermitian(2, &Interval::open(-2.0, 2.0).unwrap(), &mut rng).unwrap();
        let fa = apply_function(&ident, &a).unwrap();
        for (x, y) in fa.entries().iter().zip(a.entries()) {
            assert!((x - y).norm() < 1e-12);
        }

        let recip = parse("1 / x on (0,10)").unwrap();
        let d = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let fd = apply_function(&recip, &d).unwrap();
        assert!((fd.entry(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((fd.entry(1, 1) - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn apply_rejects_spectrum_outside_domain() {
        let f = parse("log(x) on (0,1)").unwrap();
        let a = HermitianMatrix::new(1, vec![c(3.0, 0.0)]).unwrap();
        assert!(matches!(
            apply_function(&f, &a),
            Err(Error::SpectrumOutOfDomain { .. })
        ));
    }

    #[test]
    fn apply_commutes_with_unitary_conjugation() {
        let f = parse("exp(x) on (-10,10)").unwrap();
        let mut rng = seeded(9);
        let a = random_hermitian(3, &Interval::open(-1.0, 1.0).unwrap(), &mut rng).unwrap();
        let u = haar_unitary(3, &mut rng);
        let conj = |m: &HermitianMatrix| {
            let n = 3;
            let mut out = vec![c(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = c(0.0, 0.0);
                    for k in 0..n {
                        for l in 0..n {
                            acc += u[i * n + k] * m.entry(k, l) * u[j * n + l].conj();
                        }
                    }
                    out[i * n + j] = acc;
                }
            }
            HermitianMatrix::from_parts(n, out).hermitize()
        };
        let lhs = apply_function(&f, &conj(&a)).unwrap();
        let rhs = conj(&apply_function(&f, &a).unwrap());
        for (x, y) in lhs.entries().iter().zip(rhs.entries()) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn convexity_gap_of_affine_is_zero() {
        let f = parse("poly[1,2] on (-10,10)").unwrap();
        let mut rng = seeded(13);
        let a = random_hermitian(2, &Interval::open(-2.0, 2.0).unwrap(), &mut rng).unwrap();
        let b = random_hermitian(2, &Interval::open(-2.0, 2.0).unwrap(), &mut rng).unwrap();
        let (_, min) = convexity_gap(&f, &a, &b, 0.35).unwrap();
        assert!(min.abs() < 1e-11);
    }

    #[test]
    fn convexity_gap_of_square_is_quarter_difference_squared() {
        let f = parse("poly[0,0,1] on (-10,10)").unwrap();
        let mut rng = seeded(14);
        let a = random_hermitian(2, &Interval::open(-2.0, 2.0).unwrap(), &mut rng).unwrap();
        let b = random_hermitian(2, &Interval::open(-2.0, 2.0).unwrap(), &mut rng).unwrap();
        let (gap, min) = convexity_gap(&f, &a, &b, 0.5).unwrap();
        assert!(min >= -1e-11);
        let d = HermitianMatrix::linear_combination(&[(1.0, &a), (-1.0, &b)]).hermitize();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = c(0.0, 0.0);
                for k in 0..2 {
                    acc += d.entry(i, k) * d.entry(k, j);
                }
                assert!((gap.entry(i, j) - acc * 0.25).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn convexity_gap_symmetry() {
        let f = parse("exp(x) on (-10,10)").unwrap();
        let mut rng = seeded(15);
        let a = random_hermitian(3, &Interval::open(-1.0, 1.0).unwrap(), &mut rng).unwrap();
        let b = random_hermitian(3, &Interval::open(-1.0, 1.0).unwrap(), &mut rng).unwrap();
        let lambda = 0.3;
        let (g1, m1) = convexity_gap(&f, &a, &b, lambda).unwrap();
        let (g2, m2) = convexity_gap(&f, &b, &a, 1.0 - lambda).unwrap();
        assert!((m1 - m2).abs() < 1e-11);
        for (x, y) in g1.entries().iter().zip(g2.entries()) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn monotonicity_gap_scalar_case() {
        let f = parse("x^0.5 on (0,4)").unwrap();
        let a = HermitianMatrix::new(1, vec![c(1.0, 0.0)]).unwrap();
        let b = HermitianMatrix::new(1, vec![c(2.0, 0.0)]).unwrap();
        let (_, min) = monotonicity_gap(&f, &a, &b).unwrap();
        assert!(min >= -1e-12);
        assert!(matches!(
            monotonicity_gap(&f, &b, &a),
            Err(Error::NotComparable { .. })
        ));
    }

    #[test]
    fn definitional_sqrt_monotone_unrefuted() {
        let f = parse("x^0.5 on (0,4)").unwrap();
        let r = definitional_test(&f, 2, MatrixKind::Monotone, 300, 1234).unwrap();
        assert!(!r.refuted, "worst gap {}", r.worst_gap);
    }

    #[test]
    fn definitional_cube_convexity_refuted_and_replays() {
        let f = parse("poly[0,0,0,1] on (0.1,2)").unwrap();
        let r = definitional_test(&f, 2, MatrixKind::Convex, 500, 99).unwrap();
        assert!(r.refuted);
        let w = r.witness.unwrap();
        assert!(w.gap_min_eigenvalue < -1e-6);
        let replayed = replay_witness(&f, &w).unwrap();
        assert!(
            (replayed - w.gap_min_eigenvalue).abs() <= 1e-12,
            "replay {replayed} vs {}",
            w.gap_min_eigenvalue
        );
    }

    #[test]
    fn definitional_cube_monotonicity_refuted() {
        let f = parse("poly[0,0,0,1] on (0.1,2)").unwrap();
        let r = definitional_test(&f, 2, MatrixKind::Monotone, 500, 7).unwrap();
        assert!(r.refuted);
        let w = r.witness.unwrap();
        assert_eq!(w.lambda, 1.0);
        let replayed = replay_witness(&f, &w).unwrap();
        assert!((replayed - w.gap_min_eigenvalue).abs() <= 1e-12);
    }

    #[test]
    fn definitional_scalar_convexity_unrefuted() {
        let f = parse("exp(x) on (-2,2)").unwrap();
        let r = definitional_test(&f, 1, MatrixKind::Convex, 200, 5).unwrap();
        assert!(!r.refuted);
    }

    #[test]
    fn definitional_is_deterministic() {
        let f = parse("poly[0,0,0,1] on (0.1,2)").unwrap();
        let r1 = definitional_test(&f, 2, MatrixKind::Convex, 200, 31).unwrap();
        let r2 = definitional_test(&f, 2, MatrixKind::Convex, 200, 31).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn re_im_rows_roundtrip() {
        let mut rng = seeded(77);
        let a = random_hermitian(3, &Interval::open(0.1, 4.0).unwrap(), &mut rng).unwrap();
        let rows = a.to_re_im_rows();
        let back = HermitianMatrix::from_re_im_rows(&rows).unwrap();
        assert_eq!(a, back);
    }
}
