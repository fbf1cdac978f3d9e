//! Polynomial constructions: strictly n-monotone polynomials that are also
//! strictly n-concave (or n-convex) of prescribed degree, and the search for
//! gap polynomials that are matrix convex of order n but not of order n+1.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::criteria::{
    derivative_matrix, grid_classify, psd_test, Classification, GridReport, MatrixKind,
    PsdVerdict, DEFAULT_GRID_SIZE, DEFAULT_PSD_TOL,
};
use crate::error::{Error, Result};
use crate::expr::FunctionSpec;
use crate::hermitian::{definitional_test, DefinitionalReport, Witness};
use crate::interval::Interval;

/// A real polynomial on an interval, coefficients in ascending degree order
/// with a nonzero leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
    interval: Interval,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>, interval: Interval) -> Result<Self> {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs.iter().all(|c| *c == 0.0) {
            return Err(Error::Precondition(
                "polynomial needs a nonzero coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition("coefficients must be finite".into()));
        }
        Ok(Self { coeffs, interval })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn to_function_spec(&self) -> FunctionSpec {
        FunctionSpec::polynomial(self.coeffs.clone(), self.interval)
    }

    fn negated(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            interval: self.interval,
        }
    }

    /// `f(t), f'(t), ..., f^(k)(t)` by synthetic-division Horner passes.
    pub fn eval_derivatives(&self, t: f64, k: usize) -> Vec<f64> {
        let mut normalized = vec![0.0; k + 1];
        normalized[0] = *self.coeffs.last().unwrap();
        for c in self.coeffs.iter().rev().skip(1) {
            let top = k.min(self.coeffs.len());
            for j in (1..=top).rev() {
                normalized[j] = normalized[j] * t + normalized[j - 1];
            }
            normalized[0] = normalized[0] * t + c;
        }
        let mut factorial = 1.0;
        normalized
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if j > 0 {
                    factorial *= j as f64;
                }
                v * factorial
            })
            .collect()
    }
}

/// `f(t), f'(t), ..., f^(k)(t)` for a polynomial; exact synthetic division.
pub fn poly_eval_derivatives(p: &Polynomial, t: f64, k: usize) -> Result<Vec<f64>> {
    if k > p.degree() + 2 {
        return Err(Error::Precondition(format!(
            "derivative order {k} exceeds degree {} + 2",
            p.degree()
        )));
    }
    Ok(p.eval_derivatives(t, k))
}

/// Target shape for [`construct_strict_polynomial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrictTarget {
    /// Strictly n-monotone and strictly n-concave.
    ConcaveMonotone,
    /// Strictly n-monotone and strictly n-convex.
    ConvexMonotone,
}

const CONSTRUCT_BUDGET: usize = 10_000;

/// Taylor shift: coefficients of `sum q_k (t - mid)^k` as a polynomial in t.
fn shift_from_midpoint(q: &[f64], mid: f64) -> Vec<f64> {
    let deg = q.len() - 1;
    let mut out = vec![0.0; q.len()];
    for (k, qk) in q.iter().enumerate() {
        if *qk == 0.0 {
            continue;
        }
        // Binomial row for (t - mid)^k.
        let mut binom = 1.0;
        let mut pw = 1.0;
        for i in (0..=k).rev() {
            // binom = C(k, i), pw = (-mid)^(k-i)
            out[i] += qk * binom * pw;
            if i > 0 {
                binom *= i as f64 / (k - i + 1) as f64;
                pw *= -mid;
            }
        }
        let _ = deg;
    }
    out
}

/// Verify that `p` is strictly n-monotone and strictly n-concave/convex at
/// every grid point: all leading principal minors of the monotonicity matrix
/// of `p` and of the Kraus matrix of `+-p` must exceed the scaled tolerance
/// (Sylvester's criterion, mirroring the determinant form of strictness).
/// Returns the worst minor-to-tolerance margin seen (positive iff passed).
fn verify_strict(p: &Polynomial, n: usize, target: StrictTarget, grid: &[f64]) -> Result<f64> {
    let f = p.to_function_spec();
    let curvature = match target {
        StrictTarget::ConvexMonotone => p.to_function_spec(),
        StrictTarget::ConcaveMonotone => p.negated().to_function_spec(),
    };
    let mut worst = f64::INFINITY;
    for &t in grid {
        let mono = psd_test(&derivative_matrix(&f, t, n, MatrixKind::Monotone)?, DEFAULT_PSD_TOL);
        let conv = psd_test(
            &derivative_matrix(&curvature, t, n, MatrixKind::Convex)?,
            DEFAULT_PSD_TOL,
        );
        for v in [&mono, &conv] {
            for d in &v.minors {
                worst = worst.min(d / v.tolerance - 1.0);
            }
        }
        if worst <= 0.0 {
            return Ok(worst);
        }
    }
    Ok(worst)
}

/// Construct a polynomial of exact degree `m >= 2n` that is strictly
/// n-monotone and strictly n-concave (or n-convex) on a finite interval.
///
/// Candidates have a hierarchical coefficient window: magnitudes
/// `|c_1| >> |c_2| >> ... >> |c_2n|` with consecutive-ratio gaps
/// `r_k/r_{k-1} = gamma`, so that every Hankel window of the jet is
/// diagonally dominated pointwise, followed by a fast-decay tail up to
/// degree m that pins the exact degree without disturbing the window.
/// The convex target uses all-positive coefficients, the concave target
/// alternates signs. Gap, drift fraction, and scale are sampled and each
/// candidate is re-verified on a 129-point grid.
pub fn construct_strict_polynomial(
    n: usize,
    m: usize,
    interval: Interval,
    target: StrictTarget,
    seed: u64,
) -> Result<Polynomial> {
    if n == 0 || n > 4 {
        return Err(Error::Precondition(format!(
            "order must be in 1..=4, got {n}"
        )));
    }
    if m < 2 * n {
        return Err(Error::Precondition(format!(
            "degree m = {m} must be at least 2n = {}",
            2 * n
        )));
    }
    if m > 64 {
        return Err(Error::Precondition(format!("degree m = {m} too large")));
    }
    if !interval.is_bounded() {
        return Err(Error::Precondition(
            "construction needs a finite interval".into(),
        ));
    }
    let mid = interval.midpoint();
    let halfwidth = 0.5 * (interval.hi() - interval.lo());
    let concave = target == StrictTarget::ConcaveMonotone;
    let grid = interval.interior_grid(DEFAULT_GRID_SIZE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_margin = f64::NEG_INFINITY;

    for _attempt in 0..CONSTRUCT_BUDGET {
        let gamma: f64 = rng.gen_range(6.0..10.0);
        let theta: f64 = rng.gen_range(0.5..1.0);
        // Minor-vs-tolerance clearance grows with scale (order-k minors scale
        // like scale^k while the tolerance is linear in the norm).
        let scale = 10.0f64.powi(6 * (n as i32 - 1)) * 10.0f64.powf(rng.gen_range(-0.3..0.3));
        let top = 2 * n - 1;
        let mut ratios = vec![0.0; 2 * n];
        ratios[top] = 0.2 * theta / ((top + 1) as f64 * halfwidth);
        for k in (1..top).rev() {
            ratios[k] = ratios[k + 1] / gamma;
        }
        let mut magnitude = vec![0.0; m + 1];
        magnitude[1] = scale;
        for k in 2..=(2 * n).min(m) {
            magnitude[k] = magnitude[k - 1] * ratios[k - 1] * rng.gen_range(0.9..1.1);
        }
        for k in (2 * n + 1)..=m {
            magnitude[k] = magnitude[k - 1] * 0.02 / halfwidth;
        }
        let mut u_coeffs = vec![0.0; m + 1];
        for k in 1..=m {
            let sign = if concave && k % 2 == 0 { -1.0 } else { 1.0 };
            u_coeffs[k] = sign * magnitude[k];
        }
        let coeffs = shift_from_midpoint(&u_coeffs, mid);
        let candidate = Polynomial::new(coeffs, interval)?;
        if candidate.degree() != m {
            continue;
        }
        let margin = verify_strict(&candidate, n, target, &grid)?;
        if margin > 0.0 {
            return Ok(candidate);
        }
        if margin > best_margin {
            best_margin = margin;
        }
    }
    Err(Error::SearchExhausted {
        attempts: CONSTRUCT_BUDGET,
        diagnostics: format!(
            "no strictly {target:?} candidate of degree {m} at order {n}; best minor margin {best_margin:e}"
        ),
    })
}

// ---------------------------------------------------------------------------
// Gap polynomial search
// ---------------------------------------------------------------------------

/// Certified member of `K_n(I) \ K_{n+1}(I)`: order-n convexity passes both
/// the derivative grid and the definitional test, while order n+1 is refuted
/// by an indefinite Kraus point and a concrete matrix witness.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCertificate {
    pub polynomial: Polynomial,
    pub n: usize,
    pub seed: u64,
    pub pass_grid: GridReport,
    pub pass_definitional: DefinitionalReport,
    pub fail_indefinite_t: f64,
    pub fail_indefinite: PsdVerdict,
    pub fail_witness: Witness,
}

const GAP_EVAL_BUDGET: usize = 50_000;
const GAP_WALL_BUDGET: std::time::Duration = std::time::Duration::from_secs(60);
const GAP_PASS_TRIALS: u64 = 500;
const GAP_FAIL_TRIALS: u64 = 800;
/// A refutation witness must be at least this deep to certify.
const GAP_WITNESS_THRESHOLD: f64 = -1e-6;

struct GapCheck {
    pass_grid: GridReport,
    fail_indefinite_t: f64,
    fail_indefinite: PsdVerdict,
}

/// Cheap grid-only check: order n passes everywhere, order n+1 has an
/// indefinite point. Returns the evidence or None.
fn gap_grid_check(f: &FunctionSpec, n: usize) -> Result<Option<GapCheck>> {
    let pass_grid = grid_classify(f, n, MatrixKind::Convex, DEFAULT_GRID_SIZE, DEFAULT_PSD_TOL)?;
    if !pass_grid.pass {
        return Ok(None);
    }
    let mut indefinite: Option<(f64, PsdVerdict)> = None;
    for t in f.domain.interior_grid(DEFAULT_GRID_SIZE) {
        let v = psd_test(
            &derivative_matrix(f, t, n + 1, MatrixKind::Convex)?,
            DEFAULT_PSD_TOL,
        );
        if v.classification == Classification::Indefinite {
            let replace = match &indefinite {
                None => true,
                Some((_, w)) => v.min_eigenvalue < w.min_eigenvalue,
            };
            if replace {
                indefinite = Some((t, v));
            }
        }
    }
    Ok(indefinite.map(|(t, v)| GapCheck {
        pass_grid,
        fail_indefinite_t: t,
        fail_indefinite: v,
    }))
}

/// Search for a gap polynomial of the given degree. Starts from odd-monomial
/// dominant seed shapes, then random perturbations with coordinate descent on
/// the worst order-n minor, keeping the order-(n+1) refutation alive.
/// Deterministic for a given seed.
pub fn gap_polynomial_search(
    n: usize,
    interval: Interval,
    degree: usize,
    seed: u64,
) -> Result<GapCertificate> {
    if n == 0 || n > 3 {
        return Err(Error::Precondition(format!(
            "order must be in 1..=3, got {n}"
        )));
    }
    if degree < 2 * n {
        return Err(Error::Precondition(format!(
            "degree {degree} must be at least 2n = {}",
            2 * n
        )));
    }
    if degree > 16 {
        return Err(Error::Precondition(format!("degree {degree} too large")));
    }
    if !interval.is_bounded() {
        return Err(Error::Precondition(
            "gap search needs a finite interval".into(),
        ));
    }
    let started = std::time::Instant::now();
    let mut evaluations = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = interval.hi().abs().max(interval.lo().abs()).max(1.0);

    let try_candidate = |coeffs: &[f64],
                             evaluations: &mut usize,
                             sub_seed: u64|
     -> Result<Option<GapCertificate>> {
        *evaluations += 1;
        let poly = match Polynomial::new(coeffs.to_vec(), interval) {
            Ok(p) if p.degree() == degree => p,
            _ => return Ok(None),
        };
        let f = poly.to_function_spec();
        let Some(check) = gap_grid_check(&f, n)? else {
            return Ok(None);
        };
        // Definitional evidence, only once the grids agree.
        let pass_definitional = definitional_test(&f, n, MatrixKind::Convex, GAP_PASS_TRIALS, sub_seed)?;
        if pass_definitional.refuted {
            return Ok(None);
        }
        let fail = definitional_test(
            &f,
            n + 1,
            MatrixKind::Convex,
            GAP_FAIL_TRIALS,
            sub_seed.wrapping_add(1),
        )?;
        let Some(witness) = fail.witness.clone() else {
            return Ok(None);
        };
        if !(witness.gap_min_eigenvalue < GAP_WITNESS_THRESHOLD) {
            return Ok(None);
        }
        Ok(Some(GapCertificate {
            polynomial: poly,
            n,
            seed,
            pass_grid: check.pass_grid,
            pass_definitional,
            fail_indefinite_t: check.fail_indefinite_t,
            fail_indefinite: check.fail_indefinite,
            fail_witness: witness,
        }))
    };

    let mut restart = 0u64;
    while evaluations < GAP_EVAL_BUDGET && started.elapsed() < GAP_WALL_BUDGET {
        // Seed shape: dominant top monomial, perturbed after the first try.
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = 1.0;
        if restart > 0 {
            for c in coeffs.iter_mut().take(degree) {
                *c = rng.gen_range(-0.2..0.2) / scale.powi((degree - 1) as i32).max(1.0);
            }
        }
        let sub_seed = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(restart);
        if let Some(cert) = try_candidate(&coeffs, &mut evaluations, sub_seed)? {
            return Ok(cert);
        }

        // Coordinate descent: maximize the worst order-n minor margin while
        // the order-(n+1) grid refutation stays alive.
        let objective = |c: &[f64], evals: &mut usize| -> Result<Option<f64>> {
            *evals += 1;
            let poly = match Polynomial::new(c.to_vec(), interval) {
                Ok(p) if p.degree() == degree => p,
                _ => return Ok(None),
            };
            let f = poly.to_function_spec();
            let mut worst = f64::INFINITY;
            let mut any_indefinite = false;
            for t in interval.interior_grid(33) {
                let v = psd_test(
                    &derivative_matrix(&f, t, n, MatrixKind::Convex)?,
                    DEFAULT_PSD_TOL,
                );
                worst = worst.min(v.min_eigenvalue);
                let v1 = psd_test(
                    &derivative_matrix(&f, t, n + 1, MatrixKind::Convex)?,
                    DEFAULT_PSD_TOL,
                );
                if v1.classification == Classification::Indefinite {
                    any_indefinite = true;
                }
            }
            Ok(if any_indefinite { Some(worst) } else { None })
        };
        let mut current = coeffs.clone();
        let mut value = objective(&current, &mut evaluations)?;
        let mut step = 0.1 / scale.powi(degree.saturating_sub(1) as i32).max(1.0);
        for _round in 0..12 {
            if evaluations >= GAP_EVAL_BUDGET || started.elapsed() >= GAP_WALL_BUDGET {
                break;
            }
            let mut improved = false;
            for idx in 0..degree {
                for dir in [1.0, -1.0] {
                    let mut trial = current.clone();
                    trial[idx] += dir * step;
                    let tv = objective(&trial, &mut evaluations)?;
                    if let Some(tv_val) = tv {
                        if value.map_or(true, |v| tv_val > v) {
                            current = trial;
                            value = Some(tv_val);
                            improved = true;
                        }
                    }
                }
            }
            if value.map_or(false, |v| v > 0.0) {
                if let Some(cert) =
                    try_candidate(&current, &mut evaluations, sub_seed.wrapping_add(0x1000))?
                {
                    return Ok(cert);
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        restart += 1;
    }
    Err(Error::SearchExhausted {
        attempts: evaluations,
        diagnostics: format!(
            "no gap certificate for n = {n}, degree {degree} on {interval} within budget"
        ),
    })
}

/// Re-run both evidence checks of a certificate from its stored data.
pub fn verify_gap_certificate(cert: &GapCertificate) -> Result<bool> {
    let f = cert.polynomial.to_function_spec();
    let pass = grid_classify(
        &f,
        cert.n,
        MatrixKind::Convex,
        cert.pass_grid.grid_size,
        DEFAULT_PSD_TOL,
    )?;
    if !pass.pass {
        return Ok(false);
    }
    let v = psd_test(
        &derivative_matrix(&f, cert.fail_indefinite_t, cert.n + 1, MatrixKind::Convex)?,
        DEFAULT_PSD_TOL,
    );
    if v.classification != Classification::Indefinite {
        return Ok(false);
    }
    let replayed = crate::hermitian::replay_witness(&f, &cert.fail_witness)?;
    Ok((replayed - cert.fail_witness.gap_min_eigenvalue).abs() <= 1e-12
        && replayed < GAP_WITNESS_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::jet_lift;
    use approx::assert_relative_eq;

    fn unit_interval() -> Interval {
        Interval::open(-1.0, 1.0).unwrap()
    }

    #[test]
    fn eval_derivatives_of_cube() {
        let p = Polynomial::new(vec![0.0, 0.0, 0.0, 1.0], unit_interval()).unwrap();
        assert_eq!(
            poly_eval_derivatives(&p, 1.0, 4).unwrap(),
            vec![1.0, 3.0, 6.0, 6.0, 0.0]
        );
    }

    #[test]
    fn eval_derivatives_of_constant() {
        let p = Polynomial::new(vec![5.0], unit_interval()).unwrap();
        assert_eq!(poly_eval_derivatives(&p, 0.3, 2).unwrap(), vec![5.0, 0.0, 0.0]);
    }

    #[test]
    fn eval_derivatives_matches_jets() {
        let p = Polynomial::new(
            vec![0.3, -1.2, 0.9, 2.0, -0.5, 0.1, 0.75],
            unit_interval(),
        )
        .unwrap();
        let f = p.to_function_spec();
        let t = 0.3;
        let jet = jet_lift(&f, t, 6).unwrap();
        let ds = poly_eval_derivatives(&p, t, 6).unwrap();
        for (k, d) in ds.iter().enumerate() {
            assert_relative_eq!(*d, jet.derivative(k), max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn eval_derivatives_rejects_excessive_order() {
        let p = Polynomial::new(vec![1.0, 1.0], unit_interval()).unwrap();
        assert!(poly_eval_derivatives(&p, 0.0, 5).is_err());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0], unit_interval()).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![0.0, 0.0], unit_interval()).is_err());
    }

    #[test]
    fn shift_matches_direct_expansion() {
        // q(u) = 1 + 2u + 3u^2 at mid = 0.5:
        // p(t) = 1 + 2(t-1/2) + 3(t-1/2)^2 = 0.75 - t + 3t^2
        let out = shift_from_midpoint(&[1.0, 2.0, 3.0], 0.5);
        assert_relative_eq!(out[0], 0.75, max_relative = 1e-15);
        assert_relative_eq!(out[1], -1.0, max_relative = 1e-15);
        assert_relative_eq!(out[2], 3.0, max_relative = 1e-15);
    }

    #[test]
    fn construct_rejects_degree_below_2n() {
        let err =
            construct_strict_polynomial(2, 3, unit_interval(), StrictTarget::ConvexMonotone, 1)
                .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn construct_first_order_concave() {
        let interval = Interval::open(0.0, 1.0).unwrap();
        let p =
            construct_strict_polynomial(1, 2, interval, StrictTarget::ConcaveMonotone, 42).unwrap();
        assert_eq!(p.degree(), 2);
        // f' > 0 and f'' < 0 across the interval.
        for t in interval.interior_grid(33) {
            let d = p.eval_derivatives(t, 2);
            assert!(d[1] > 0.0, "f'({t}) = {}", d[1]);
            assert!(d[2] < 0.0, "f''({t}) = {}", d[2]);
        }
    }

    #[test]
    fn construct_second_order_both_targets() {
        for (target, seed) in [
            (StrictTarget::ConvexMonotone, 7u64),
            (StrictTarget::ConcaveMonotone, 8u64),
        ] {
            let p = construct_strict_polynomial(2, 4, unit_interval(), target, seed).unwrap();
            assert_eq!(p.degree(), 4);
            let grid = unit_interval().interior_grid(DEFAULT_GRID_SIZE);
            let margin = verify_strict(&p, 2, target, &grid).unwrap();
            assert!(margin > 0.0, "{target:?} margin {margin:e}");
        }
    }

    #[test]
    fn constructed_polynomials_nest_downwards() {
        // A strictly 2-convex-monotone polynomial is in particular 1-convex
        // and 1-monotone on the same interval (non-strict direction).
        let p = construct_strict_polynomial(
            2,
            6,
            unit_interval(),
            StrictTarget::ConvexMonotone,
            21,
        )
        .unwrap();
        let f = p.to_function_spec();
        for kind in [MatrixKind::Monotone, MatrixKind::Convex] {
            let r = grid_classify(&f, 1, kind, 65, DEFAULT_PSD_TOL).unwrap();
            assert!(r.pass, "{kind:?}");
        }
    }

    #[test]
    fn gap_search_first_order_cubic() {
        let interval = Interval::open(0.1, 2.0).unwrap();
        let cert = gap_polynomial_search(1, interval, 3, 2024).unwrap();
        assert_eq!(cert.polynomial.degree(), 3);
        assert!(cert.pass_grid.pass);
        assert!(!cert.pass_definitional.refuted);
        assert_eq!(
            cert.fail_indefinite.classification,
            Classification::Indefinite
        );
        assert!(cert.fail_witness.gap_min_eigenvalue < -1e-6);
        assert_eq!(cert.fail_witness.a.dim(), 2);
        assert!(verify_gap_certificate(&cert).unwrap());
    }

    #[test]
    fn gap_search_is_deterministic() {
        let interval = Interval::open(0.1, 2.0).unwrap();
        let a = gap_polynomial_search(1, interval, 3, 5).unwrap();
        let b = gap_polynomial_search(1, interval, 3, 5).unwrap();
        assert_eq!(a.polynomial, b.polynomial);
        assert_eq!(
            a.fail_witness.gap_min_eigenvalue,
            b.fail_witness.gap_min_eigenvalue
        );
    }

    #[test]
    fn gap_search_rejects_low_degree() {
        let err = gap_polynomial_search(1, unit_interval(), 1, 0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
