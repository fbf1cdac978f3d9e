//! Differential criteria for matrix monotonicity and convexity of order n:
//! Hankel derivative matrices, strictness determinants, the perturbation
//! certificate, pointwise grid classification, closed forms for powers,
//! representation-function concavity, derivative sign patterns, and the
//! whole-line rigidity scan.

use crate::error::{Error, Result};
use crate::expr::FunctionSpec;
use crate::jet::{antiderivative_jet, jet_lift, pow_series, Jet};
use crate::linalg::{inf_norm, leading_minors, sym_eigenvalues};

/// Default absolute scale for PSD classification; the effective tolerance is
/// `tol * max(1, inf-norm of the matrix)`. Jets are accurate to ~1e-13, so
/// 1e-8 separates genuine boundary zeros from rounding noise.
pub const DEFAULT_PSD_TOL: f64 = 1e-8;

/// Default absolute tolerance for derivative sign checks.
pub const DEFAULT_SIGN_TOL: f64 = 1e-10;

/// Which Hankel matrix a criterion refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Entries `f^(i+j-1)(t) / (i+j-1)!` (Dobsch-type monotonicity matrix).
    Monotone,
    /// Entries `f^(i+j)(t) / (i+j)!` (Kraus matrix).
    Convex,
}

impl MatrixKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatrixKind::Monotone => "monotone",
            MatrixKind::Convex => "convex",
        }
    }
}

/// An n x n Hankel matrix of normalized derivatives at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeMatrix {
    kind: MatrixKind,
    n: usize,
    base_point: f64,
    entries: Vec<f64>,
}

impl DerivativeMatrix {
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// 0-based access.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn determinant(&self) -> f64 {
        leading_minors(&self.entries, self.n)[self.n - 1]
    }
}

fn check_order_arg(n: usize) -> Result<()> {
    if n == 0 || n > 12 {
        return Err(Error::Precondition(format!(
            "matrix order must be in 1..=12, got {n}"
        )));
    }
    Ok(())
}

/// Kraus matrix `K_n(f;t)` with entries `f^(i+j)(t)/(i+j)!`.
pub fn kraus_matrix(f: &FunctionSpec, t: f64, n: usize) -> Result<DerivativeMatrix> {
    check_order_arg(n)?;
    let jet = jet_lift(f, t, 2 * n)?;
    Ok(hankel_from_jet(&jet, t, n, MatrixKind::Convex))
}

/// Dobsch-type monotonicity matrix with entries `f^(i+j-1)(t)/(i+j-1)!`.
pub fn dobsch_matrix(f: &FunctionSpec, t: f64, n: usize) -> Result<DerivativeMatrix> {
    check_order_arg(n)?;
    let jet = jet_lift(f, t, 2 * n - 1)?;
    Ok(hankel_from_jet(&jet, t, n, MatrixKind::Monotone))
}

/// The matrix of the requested kind.
pub fn derivative_matrix(
    f: &FunctionSpec,
    t: f64,
    n: usize,
    kind: MatrixKind,
) -> Result<DerivativeMatrix> {
    match kind {
        MatrixKind::Monotone => dobsch_matrix(f, t, n),
        MatrixKind::Convex => kraus_matrix(f, t, n),
    }
}

fn hankel_from_jet(jet: &Jet, t: f64, n: usize, kind: MatrixKind) -> DerivativeMatrix {
    let shift = match kind {
        MatrixKind::Monotone => 1,
        MatrixKind::Convex => 2,
    };
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = jet.coeff(i + j + shift);
        }
    }
    DerivativeMatrix {
        kind,
        n,
        base_point: t,
        entries,
    }
}

/// Build the Kraus matrix of the antiderivative `g = ∫f` directly from the
/// jet of `f`; the entries only need `f', ..., f^(2n-1)`.
pub fn kraus_matrix_of_antiderivative(
    f: &FunctionSpec,
    t: f64,
    n: usize,
) -> Result<DerivativeMatrix> {
    check_order_arg(n)?;
    let jet = jet_lift(f, t, 2 * n - 1)?;
    let anti = antiderivative_jet(&jet)?;
    Ok(hankel_from_jet(&anti, t, n, MatrixKind::Convex))
}

/// Three-way PSD classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    PositiveDefinite,
    BoundaryPsd,
    Indefinite,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::PositiveDefinite => "positive-definite",
            Classification::BoundaryPsd => "boundary-psd",
            Classification::Indefinite => "indefinite",
        }
    }
}

/// Outcome of a PSD test: minimum eigenvalue, leading principal minors, and
/// the classification at the effective tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdVerdict {
    pub min_eigenvalue: f64,
    pub minors: Vec<f64>,
    pub classification: Classification,
    pub tolerance: f64,
}

impl PsdVerdict {
    /// Non-strict acceptance: boundary cases count as PSD.
    pub fn is_psd(&self) -> bool {
        self.classification != Classification::Indefinite
    }
}

/// Classify an arbitrary symmetric matrix (row-major). The minimum
/// eigenvalue comes from a Jacobi decomposition; the minors from
/// fraction-free elimination, as an independent route.
pub fn psd_verdict(entries: &[f64], n: usize, tol: f64) -> PsdVerdict {
    assert!(n >= 1 && n <= 12, "psd test supports orders 1..=12");
    let scaled = tol * inf_norm(entries).max(1.0);
    let eigenvalues = sym_eigenvalues(entries, n);
    let min_eigenvalue = eigenvalues[0];
    let minors = leading_minors(entries, n);
    let classification = if min_eigenvalue > scaled {
        Classification::PositiveDefinite
    } else if min_eigenvalue < -scaled {
        Classification::Indefinite
    } else {
        Classification::BoundaryPsd
    };
    PsdVerdict {
        min_eigenvalue,
        minors,
        classification,
        tolerance: scaled,
    }
}

/// PSD test of a derivative matrix.
pub fn psd_test(m: &DerivativeMatrix, tol: f64) -> PsdVerdict {
    psd_verdict(&m.entries, m.n, tol)
}

/// Strict positivity of the order-n determinant of the given kind at `t`.
pub fn strict_check(f: &FunctionSpec, t: f64, n: usize, kind: MatrixKind) -> Result<bool> {
    let m = derivative_matrix(f, t, n, kind)?;
    let scaled = DEFAULT_PSD_TOL * inf_norm(&m.entries).max(1.0);
    Ok(m.determinant() > scaled)
}

// ---------------------------------------------------------------------------
// Perturbation certificate
// ---------------------------------------------------------------------------

/// Evidence that all leading minors of `K_n(f + eps g; t0)` stay positive on
/// a dyadic ladder below `eta`, so that `K_n(f; t0)` is PSD in the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCertificate {
    pub t0: f64,
    pub n: usize,
    pub eta: f64,
    /// `(eps, D_1..D_n)` for every sampled eps below eta, descending.
    pub epsilon_samples: Vec<(f64, Vec<f64>)>,
    pub limit_verdict: PsdVerdict,
}

const LADDER_BOTTOM_EXP: i32 = 40;

/// Sample the minor polynomials `p_m(eps) = D_m(K_n(f + eps g; t0))` on the
/// ladder `1, 1/2, ..., 2^-40` and find a verified positive window.
///
/// The perturber must have all leading minors of `K_n(g; t0)` strictly
/// positive (it is strictly n-convex at `t0` with a positive-definite Kraus
/// matrix), otherwise `InvalidPerturber` is returned.
pub fn perturbation_certificate(
    f: &FunctionSpec,
    g: &FunctionSpec,
    t0: f64,
    n: usize,
) -> Result<PerturbationCertificate> {
    check_order_arg(n)?;
    let kg = kraus_matrix(g, t0, n)?;
    let g_tol = DEFAULT_PSD_TOL * inf_norm(kg.entries()).max(1.0);
    let g_minors = leading_minors(kg.entries(), n);
    if let Some((m, d)) = g_minors.iter().enumerate().find(|(_, d)| **d <= g_tol) {
        return Err(Error::InvalidPerturber(format!(
            "D_{}(K_{n}(g; {t0})) = {d:e} is not strictly positive",
            m + 1
        )));
    }

    let jf = jet_lift(f, t0, 2 * n)?;
    let jg = jet_lift(g, t0, 2 * n)?;
    let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(LADDER_BOTTOM_EXP as usize + 1);
    for e in 0..=LADDER_BOTTOM_EXP {
        let eps = 2.0f64.powi(-e);
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = i + j + 2;
                entries[i * n + j] = jf.coeff(k) + eps * jg.coeff(k);
            }
        }
        samples.push((eps, leading_minors(&entries, n)));
    }

    let failing = |minors: &[f64]| minors.iter().position(|d| *d <= 0.0);
    // The ladder is descending, so the last failing sample is the smallest.
    let smallest_failure = samples
        .iter()
        .rev()
        .find_map(|(eps, minors)| failing(minors).map(|m| (*eps, m, minors[m])));
    if let Some((eps, m, value)) = smallest_failure {
        if eps == 2.0f64.powi(-LADDER_BOTTOM_EXP) {
            return Err(Error::NoPositiveWindow {
                t0,
                minor: m + 1,
                value,
                eps,
            });
        }
        let eta = eps;
        samples.retain(|(e, _)| *e < eta);
        let limit_verdict = psd_test(&kraus_matrix(f, t0, n)?, DEFAULT_PSD_TOL);
        return Ok(PerturbationCertificate {
            t0,
            n,
            eta,
            epsilon_samples: samples,
            limit_verdict,
        });
    }

    let limit_verdict = psd_test(&kraus_matrix(f, t0, n)?, DEFAULT_PSD_TOL);
    Ok(PerturbationCertificate {
        t0,
        n,
        eta: 1.0,
        epsilon_samples: samples,
        limit_verdict,
    })
}

// ---------------------------------------------------------------------------
// Grid classification
// ---------------------------------------------------------------------------

/// Pointwise PSD verdicts over an interior grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub kind: MatrixKind,
    pub n: usize,
    pub grid_size: usize,
    pub pass: bool,
    pub indefinite_points: usize,
    pub worst_t: f64,
    pub worst: PsdVerdict,
}

/// Default grid size: interior Chebyshev points cluster near the endpoints
/// where the criteria typically fail first.
pub const DEFAULT_GRID_SIZE: usize = 129;

/// Run the PSD test of the given kind at every grid point. PASS means no
/// point classified Indefinite (boundary cases count as pass).
pub fn grid_classify(
    f: &FunctionSpec,
    n: usize,
    kind: MatrixKind,
    grid_size: usize,
    tol: f64,
) -> Result<GridReport> {
    if grid_size < 16 {
        return Err(Error::Precondition(format!(
            "grid size must be at least 16, got {grid_size}"
        )));
    }
    check_order_arg(n)?;
    let mut worst: Option<(f64, PsdVerdict)> = None;
    let mut indefinite_points = 0usize;
    for t in f.domain.interior_grid(grid_size) {
        let m = derivative_matrix(f, t, n, kind)?;
        let v = psd_test(&m, tol);
        if v.classification == Classification::Indefinite {
            indefinite_points += 1;
        }
        let replace = match &worst {
            None => true,
            Some((_, w)) => v.min_eigenvalue < w.min_eigenvalue,
        };
        if replace {
            worst = Some((t, v));
        }
    }
    let (worst_t, worst) = worst.expect("grid is nonempty");
    Ok(GridReport {
        kind,
        n,
        grid_size,
        pass: indefinite_points == 0,
        indefinite_points,
        worst_t,
        worst,
    })
}

// ---------------------------------------------------------------------------
// Closed forms for t^p
// ---------------------------------------------------------------------------

/// Determinant of the order-2 monotonicity matrix of `t^p`:
/// `-(1/12) p^2 (p-1)(p+1) t^(2p-4)`.
pub fn power_monotone_det(p: f64, t: f64) -> f64 {
    -(1.0 / 12.0) * p * p * (p - 1.0) * (p + 1.0) * t.powf(2.0 * p - 4.0)
}

/// Determinant of the order-2 Kraus matrix of `t^p`:
/// `-(1/144) p^2 (p-1)^2 (p-2)(p+1) t^(2p-6)`.
pub fn power_convex_det(p: f64, t: f64) -> f64 {
    -(1.0 / 144.0) * p * p * (p - 1.0) * (p - 1.0) * (p - 2.0) * (p + 1.0) * t.powf(2.0 * p - 6.0)
}

/// Order-2 classification of `t^p` on a positive interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerVerdict {
    pub p: f64,
    pub is_2monotone: bool,
    pub is_2convex: bool,
}

/// `t^p` is 2-monotone iff `0 <= p <= 1` and 2-convex iff `-1 <= p <= 0` or
/// `1 <= p <= 2`.
pub fn classify_power(p: f64) -> PowerVerdict {
    PowerVerdict {
        p,
        is_2monotone: (0.0..=1.0).contains(&p),
        is_2convex: (-1.0..=0.0).contains(&p) || (1.0..=2.0).contains(&p),
    }
}

// ---------------------------------------------------------------------------
// Representation-function concavity
// ---------------------------------------------------------------------------

/// Which representation function to test: `c = (f')^(-1/2)` for the
/// monotonicity route or `d = (f'')^(-1/3)` for the convexity route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepKind {
    MonotoneRep,
    ConvexRep,
}

/// A representation function bound to its source spec.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationFunction {
    pub kind: RepKind,
    pub source: FunctionSpec,
}

impl RepresentationFunction {
    pub fn new(kind: RepKind, source: FunctionSpec) -> Self {
        Self { kind, source }
    }

    /// Jet of the representation function at `t`, to second order.
    /// Errors with `Positivity` where f' (resp. f'') is not positive, which
    /// itself refutes 2-monotonicity (resp. 2-convexity).
    pub fn jet2(&self, t: f64) -> Result<Vec<f64>> {
        let (orders, exponent, what) = match self.kind {
            RepKind::MonotoneRep => (3, -0.5, "f'"),
            RepKind::ConvexRep => (4, -1.0 / 3.0, "f''"),
        };
        let mut jet = jet_lift(&self.source, t, orders)?;
        jet = jet.derivative_jet();
        if self.kind == RepKind::ConvexRep {
            jet = jet.derivative_jet();
        }
        let value = jet.coeff(0);
        if value <= 0.0 {
            return Err(Error::Positivity {
                t,
                what: what.into(),
                value,
            });
        }
        pow_series(jet.coeffs(), exponent).ok_or(Error::Positivity {
            t,
            what: what.into(),
            value,
        })
    }

    /// Second derivative of the representation function at `t`.
    pub fn second_derivative(&self, t: f64) -> Result<f64> {
        Ok(2.0 * self.jet2(t)?[2])
    }
}

/// Grid concavity report for a representation function.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub kind: RepKind,
    pub concave: bool,
    /// First `(t, second derivative)` violating concavity, if any.
    pub first_violation: Option<(f64, f64)>,
    pub points_checked: usize,
}

/// Check concavity of the representation function on an interior grid.
pub fn representation_concavity(
    f: &FunctionSpec,
    kind: RepKind,
    grid_size: usize,
) -> Result<ConcavityReport> {
    let rep = RepresentationFunction::new(kind, f.clone());
    let mut first_violation = None;
    let grid = f.domain.interior_grid(grid_size);
    let points_checked = grid.len();
    for t in grid {
        let series = rep.jet2(t)?;
        let second = 2.0 * series[2];
        let tol = DEFAULT_PSD_TOL * series[0].abs().max(1.0);
        if second > tol && first_violation.is_none() {
            first_violation = Some((t, second));
        }
    }
    Ok(ConcavityReport {
        kind,
        concave: first_violation.is_none(),
        first_violation,
        points_checked,
    })
}

// ---------------------------------------------------------------------------
// Sign-pattern theorem on half-infinite intervals
// ---------------------------------------------------------------------------

/// One sign condition `(-1)^k f^(order)(t) >= 0` (or `<= 0` when
/// `expected_nonneg` is false, for the induced concavity rows).
#[derive(Debug, Clone, PartialEq)]
pub struct SignCheck {
    /// Derivative order being inspected.
    pub order: usize,
    pub t: f64,
    pub value: f64,
    /// Whether the signed value is required to be >= -tol.
    pub expected_nonneg: bool,
    pub pass: bool,
}

/// Report of the alternating-sign derivative checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPatternReport {
    pub kind: MatrixKind,
    pub n: usize,
    pub pass: bool,
    /// The theorem's alternating conditions.
    pub main: Vec<SignCheck>,
    /// The induced convexity/concavity pattern of the derivatives, restated
    /// as sign conditions two orders up.
    pub induced: Vec<SignCheck>,
}

/// Check `(-1)^k f^(k+1)(t) >= 0` for `k = 0..2n-2` (monotone kind) or
/// `(-1)^k f^(k+2)(t) >= 0` (convex kind) at the sample points, on a domain
/// of the form `(alpha, inf)`.
pub fn sign_pattern_check(
    f: &FunctionSpec,
    n: usize,
    kind: MatrixKind,
    sample_points: &[f64],
    tol: f64,
) -> Result<SignPatternReport> {
    check_order_arg(n)?;
    if !f.domain.is_half_infinite_above() {
        return Err(Error::Hypothesis(format!(
            "sign-pattern theorem needs a domain of the form (a, inf), got {}",
            f.domain
        )));
    }
    if sample_points.is_empty() {
        return Err(Error::Precondition("no sample points given".into()));
    }
    let base = match kind {
        MatrixKind::Monotone => 1usize,
        MatrixKind::Convex => 2usize,
    };
    let top_order = 2 * n - 2 + base;
    let mut main = Vec::new();
    let mut induced = Vec::new();
    for &t in sample_points {
        let jet = jet_lift(f, t, top_order)?;
        let deriv = |order: usize| jet.derivative(order);
        for k in 0..=(2 * n - 2) {
            let order = k + base;
            let value = deriv(order);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            main.push(SignCheck {
                order,
                t,
                value,
                expected_nonneg: sign > 0.0,
                pass: sign * value >= -tol,
            });
        }
        // Induced curvature of f and its derivatives, stated on f^(m+2).
        // Monotone: even m up to 2n-4 concave, odd m up to 2n-3 convex.
        // Convex: even m up to 2n-2 convex, odd m up to 2n-3 concave.
        let (even_top, even_is_convex) = match kind {
            MatrixKind::Monotone => (2 * n as i64 - 4, false),
            MatrixKind::Convex => (2 * n as i64 - 2, true),
        };
        for m in 0..=(2 * n - 2) {
            let is_even = m % 2 == 0;
            let included = if is_even {
                (m as i64) <= even_top
            } else {
                (m as i64) <= 2 * n as i64 - 3
            };
            if !included || m + 2 > top_order {
                continue;
            }
            let value = deriv(m + 2);
            let expected_nonneg = if is_even {
                even_is_convex
            } else {
                !even_is_convex
            };
            let pass = if expected_nonneg {
                value >= -tol
            } else {
                value <= tol
            };
            induced.push(SignCheck {
                order: m + 2,
                t,
                value,
                expected_nonneg,
                pass,
            });
        }
    }
    let pass = main.iter().all(|c| c.pass) && induced.iter().all(|c| c.pass);
    Ok(SignPatternReport {
        kind,
        n,
        pass,
        main,
        induced,
    })
}

// ---------------------------------------------------------------------------
// Whole-line rigidity scan
// ---------------------------------------------------------------------------

/// A point where the order-2 matrix of the scanned kind is indefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanWitness {
    pub t: f64,
    pub radius: f64,
    pub verdict: PsdVerdict,
}

/// Per-radius summary row of the scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusRow {
    pub radius: f64,
    pub worst_min_eigenvalue: f64,
    pub worst_determinant: f64,
}

/// Outcome of [`whole_line_rigidity_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub kind: MatrixKind,
    pub witness: Option<ScanWitness>,
    pub rows: Vec<RadiusRow>,
}

const SCAN_POINTS_PER_RADIUS: usize = 33;

/// Scan expanding symmetric grids `[-R, R]` with `R = 1, 2, 4, ...` for a
/// point where the order-2 matrix of the given kind is indefinite. For a
/// whole-line function that is not affine (monotone case) or not quadratic
/// (convex case) such a point must exist.
pub fn whole_line_rigidity_scan(
    f: &FunctionSpec,
    kind: MatrixKind,
    radius_steps: u32,
) -> Result<ScanReport> {
    if !f.domain.is_whole_line() {
        return Err(Error::Hypothesis(format!(
            "rigidity scan needs the whole real line, got {}",
            f.domain
        )));
    }
    let mut rows = Vec::new();
    for step in 0..=radius_steps {
        let radius = 2.0f64.powi(step as i32);
        let grid = crate::interval::Interval::open(-radius, radius)
            .expect("radius is positive")
            .interior_grid(SCAN_POINTS_PER_RADIUS);
        let mut worst_eig = f64::INFINITY;
        let mut worst_det = f64::INFINITY;
        for t in grid {
            let m = derivative_matrix(f, t, 2, kind)?;
            let v = psd_test(&m, DEFAULT_PSD_TOL);
            worst_eig = worst_eig.min(v.min_eigenvalue);
            worst_det = worst_det.min(v.minors[1]);
            if v.classification == Classification::Indefinite {
                rows.push(RadiusRow {
                    radius,
                    worst_min_eigenvalue: worst_eig,
                    worst_determinant: worst_det,
                });
                return Ok(ScanReport {
                    kind,
                    witness: Some(ScanWitness {
                        t,
                        radius,
                        verdict: v,
                    }),
                    rows,
                });
            }
        }
        rows.push(RadiusRow {
            radius,
            worst_min_eigenvalue: worst_eig,
            worst_determinant: worst_det,
        });
    }
    Ok(ScanReport {
        kind,
        witness: None,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Antiderivative convexity
// ---------------------------------------------------------------------------

/// The indefinite integral of a 2-monotone function is 2-convex: verify
/// `K_2(∫f; t)` is PSD on the grid, after checking the monotonicity
/// precondition on `f` itself.
pub fn antiderivative_convexity(f: &FunctionSpec, grid_size: usize) -> Result<GridReport> {
    let pre = grid_classify(f, 2, MatrixKind::Monotone, grid_size, DEFAULT_PSD_TOL)?;
    if !pre.pass {
        return Err(Error::NotMonotone { t: pre.worst_t });
    }
    if grid_size < 16 {
        return Err(Error::Precondition(format!(
            "grid size must be at least 16, got {grid_size}"
        )));
    }
    let mut worst: Option<(f64, PsdVerdict)> = None;
    let mut indefinite_points = 0usize;
    for t in f.domain.interior_grid(grid_size) {
        let m = kraus_matrix_of_antiderivative(f, t, 2)?;
        let v = psd_test(&m, DEFAULT_PSD_TOL);
        if v.classification == Classification::Indefinite {
            indefinite_points += 1;
        }
        let replace = match &worst {
            None => true,
            Some((_, w)) => v.min_eigenvalue < w.min_eigenvalue,
        };
        if replace {
            worst = Some((t, v));
        }
    }
    let (worst_t, worst) = worst.expect("grid is nonempty");
    Ok(GridReport {
        kind: MatrixKind::Convex,
        n: 2,
        grid_size,
        pass: indefinite_points == 0,
        indefinite_points,
        worst_t,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::parse::parse;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube() -> FunctionSpec {
        parse("poly[0,0,0,1] on (-inf,inf)").unwrap()
    }

    #[test]
    fn kraus_of_cube() {
        let t = 0.7;
        let m = kraus_matrix(&cube(), t, 2).unwrap();
        assert_eq!(m.entries(), &[3.0 * t, 1.0, 1.0, 0.0]);
        assert_relative_eq!(m.determinant(), -1.0, max_relative = 1e-14);
    }

    #[test]
    fn kraus_of_square_is_boundary() {
        let f = parse("poly[0,0,1]").unwrap();
        let m = kraus_matrix(&f, 1.3, 2).unwrap();
        assert_eq!(m.entries(), &[1.0, 0.0, 0.0, 0.0]);
        let v = psd_test(&m, DEFAULT_PSD_TOL);
        assert_eq!(v.classification, Classification::BoundaryPsd);
        assert_eq!(v.minors, vec![1.0, 0.0]);
    }

    #[test]
    fn kraus_of_exp_at_zero() {
        let f = parse("exp(x)").unwrap();
        let m = kraus_matrix(&f, 0.0, 2).unwrap();
        let want = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 24.0];
        for (a, b) in m.entries().iter().zip(&want) {
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
        let v = psd_test(&m, DEFAULT_PSD_TOL);
        assert_eq!(v.classification, Classification::Indefinite);
        assert_relative_eq!(v.minors[1], -1.0 / 144.0, max_relative = 1e-13);
    }

    #[test]
    fn dobsch_of_sqrt_at_one() {
        let f = parse("x^0.5 on (0,inf)").unwrap();
        let m = dobsch_matrix(&f, 1.0, 2).unwrap();
        let want = [0.5, -0.125, -0.125, 0.0625];
        for (a, b) in m.entries().iter().zip(&want) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn dobsch_of_identity_and_cube() {
        let ident = parse("x").unwrap();
        let m = dobsch_matrix(&ident, 5.0, 2).unwrap();
        assert_eq!(m.entries(), &[1.0, 0.0, 0.0, 0.0]);

        let m = dobsch_matrix(&cube(), 1.0, 2).unwrap();
        assert_eq!(m.entries(), &[3.0, 3.0, 3.0, 1.0]);
        assert_relative_eq!(m.determinant(), -6.0, max_relative = 1e-14);
    }

    #[test]
    fn hankel_structure_is_exact() {
        let f = parse("exp(x) * x^0.5 on (0,inf)").unwrap();
        for kind in [MatrixKind::Monotone, MatrixKind::Convex] {
            let m = derivative_matrix(&f, 1.7, 4, kind).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    for (i2, j2) in [(j, i), (i.min(j), i.max(j))] {
                        assert_eq!(m.entry(i, j), m.entry(i2, j2));
                    }
                }
            }
            // Entries agree with the jet coefficients exactly.
            let shift = if kind == MatrixKind::Monotone { 1 } else { 2 };
            let jet = jet_lift(&f, 1.7, 2 * 4).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(m.entry(i, j), jet.coeff(i + j + shift));
                }
            }
        }
    }

    #[test]
    fn strict_checks() {
        let sqrt = parse("x^0.5 on (0,inf)").unwrap();
        assert!(strict_check(&sqrt, 1.0, 2, MatrixKind::Monotone).unwrap());
        let m = dobsch_matrix(&sqrt, 1.0, 2).unwrap();
        assert_relative_eq!(m.determinant(), 0.015625, max_relative = 1e-12);

        let ident = parse("x").unwrap();
        assert!(!strict_check(&ident, 1.0, 2, MatrixKind::Monotone).unwrap());
        let sq = parse("poly[0,0,1]").unwrap();
        assert!(!strict_check(&sq, 1.0, 2, MatrixKind::Convex).unwrap());
    }

    #[test]
    fn power_closed_forms() {
        assert_relative_eq!(power_monotone_det(0.5, 1.0), 1.0 / 64.0);
        assert_eq!(power_monotone_det(1.0, 3.7), 0.0);
        assert_relative_eq!(power_monotone_det(2.0, 1.0), -1.0);

        assert_relative_eq!(power_convex_det(3.0, 1.0), -1.0);
        assert_eq!(power_convex_det(2.0, 1.4), 0.0);
        assert_eq!(power_convex_det(-1.0, 2.2), 0.0);
    }

    #[test]
    fn closed_forms_match_jets_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..50 {
            let p: f64 = rng.gen_range(-2.0..3.0);
            let t: f64 = rng.gen_range(0.5..2.0);
            let f = FunctionSpec::power(p, Interval::positive_axis());
            let dm = dobsch_matrix(&f, t, 2).unwrap().determinant();
            let cm = power_monotone_det(p, t);
            assert!(
                (dm - cm).abs() <= 1e-9 * cm.abs().max(1.0),
                "monotone det p={p} t={t}: {dm} vs {cm}"
            );
            let dk = kraus_matrix(&f, t, 2).unwrap().determinant();
            let ck = power_convex_det(p, t);
            assert!(
                (dk - ck).abs() <= 1e-9 * ck.abs().max(1.0),
                "convex det p={p} t={t}: {dk} vs {ck}"
            );
        }
    }

    #[test]
    fn classify_power_table() {
        assert_eq!(
            classify_power(0.5),
            PowerVerdict {
                p: 0.5,
                is_2monotone: true,
                is_2convex: false
            }
        );
        assert_eq!(
            classify_power(1.5),
            PowerVerdict {
                p: 1.5,
                is_2monotone: false,
                is_2convex: true
            }
        );
        assert_eq!(
            classify_power(3.0),
            PowerVerdict {
                p: 3.0,
                is_2monotone: false,
                is_2convex: false
            }
        );
    }

    #[test]
    fn grid_examples() {
        let sqrt = parse("x^0.5 on (0.1,10)").unwrap();
        let r = grid_classify(&sqrt, 2, MatrixKind::Monotone, 65, DEFAULT_PSD_TOL).unwrap();
        assert!(r.pass);

        let cube = parse("poly[0,0,0,1] on (0.1,10)").unwrap();
        let r = grid_classify(&cube, 2, MatrixKind::Convex, 65, DEFAULT_PSD_TOL).unwrap();
        assert!(!r.pass);
        assert_eq!(r.indefinite_points, 65, "D_2 = -1 at every point");

        let affine = parse("poly[2,3]").unwrap();
        for kind in [MatrixKind::Monotone, MatrixKind::Convex] {
            let r = grid_classify(&affine, 3, kind, 33, DEFAULT_PSD_TOL).unwrap();
            assert!(r.pass);
            assert_eq!(r.worst.classification, Classification::BoundaryPsd);
        }
    }

    #[test]
    fn grid_rejects_tiny_grid() {
        let f = parse("x").unwrap();
        assert!(grid_classify(&f, 2, MatrixKind::Monotone, 8, DEFAULT_PSD_TOL).is_err());
    }

    #[test]
    fn perturbation_boundary_case() {
        // f = t^2 at t0 = 0 with a hand-built strictly 2-convex quartic.
        let f = parse("poly[0,0,1]").unwrap();
        let g = parse("poly[0,0,1,0.5,1]").unwrap();
        let cert = perturbation_certificate(&f, &g, 0.0, 2).unwrap();
        assert!(cert.eta > 0.0);
        assert_eq!(cert.eta, 1.0, "every ladder value keeps minors positive");
        assert!(cert
            .epsilon_samples
            .iter()
            .all(|(_, minors)| minors.iter().all(|d| *d > 0.0)));
        assert_eq!(cert.limit_verdict.classification, Classification::BoundaryPsd);
    }

    #[test]
    fn perturbation_self_perturb_is_definite() {
        let g = parse("poly[0,0,1,0.5,1]").unwrap();
        let cert = perturbation_certificate(&g, &g, 0.0, 2).unwrap();
        assert_eq!(cert.eta, 1.0);
        assert_eq!(
            cert.limit_verdict.classification,
            Classification::PositiveDefinite
        );
    }

    #[test]
    fn perturbation_rejects_nonconvex_target() {
        // Truncations of 1/(2-t) + 1/(3-t) at t0 = 1: K_2(g;1) is
        // [[1.125, 1.0625], [1.0625, 1.03125]], positive definite.
        use crate::expr::Expr;
        let g = FunctionSpec::new(
            Expr::poly(vec![1.5, 1.25, 1.125, 1.0625, 1.03125])
                .substitute(&Expr::sum(vec![Expr::var(), Expr::constant(-1.0)])),
            Interval::open(-10.0, 10.0).unwrap(),
        );
        let kg = kraus_matrix(&g, 1.0, 2).unwrap();
        assert_relative_eq!(kg.determinant(), 0.03125, max_relative = 1e-12);
        let err = perturbation_certificate(&cube(), &g, 1.0, 2).unwrap_err();
        assert!(matches!(err, Error::NoPositiveWindow { .. }), "{err:?}");
    }

    #[test]
    fn perturbation_rejects_invalid_perturber() {
        let f = parse("poly[0,0,1]").unwrap();
        // The identity is not strictly 2-convex anywhere.
        let err = perturbation_certificate(&f, &parse("x").unwrap(), 0.0, 2).unwrap_err();
        assert!(matches!(err, Error::InvalidPerturber(_)), "{err:?}");
    }

    #[test]
    fn representation_concavity_cases() {
        let sqrt = parse("x^0.5 on (0.25,4)").unwrap();
        let r = representation_concavity(&sqrt, RepKind::MonotoneRep, 65).unwrap();
        assert!(r.concave, "c(t) ~ t^0.25 is concave");

        let cube = parse("poly[0,0,0,1] on (0.5,2)").unwrap();
        let r = representation_concavity(&cube, RepKind::MonotoneRep, 65).unwrap();
        assert!(!r.concave, "c(t) ~ 1/t is convex");
        assert!(r.first_violation.is_some());

        let sq = parse("poly[0,0,1] on (1,2)").unwrap();
        let r = representation_concavity(&sq, RepKind::MonotoneRep, 65).unwrap();
        assert!(!r.concave, "c(t) ~ t^(-1/2) is convex");
    }

    #[test]
    fn representation_concavity_positivity_error() {
        let dec = parse("-x on (0,1)").unwrap();
        let err = representation_concavity(&dec, RepKind::MonotoneRep, 33).unwrap_err();
        assert!(matches!(err, Error::Positivity { .. }), "{err:?}");
    }

    #[test]
    fn representation_second_derivative_matches_analytic() {
        // For f = t^p: c(t) = p^(-1/2) t^((1-p)/2), so
        // c'' = p^(-1/2) q (q-1) t^(q-2) with q = (1-p)/2.
        let p = 0.5f64;
        let f = FunctionSpec::power(p, Interval::positive_axis());
        let rep = RepresentationFunction::new(RepKind::MonotoneRep, f);
        for t in [0.5f64, 1.0, 2.0] {
            let q = (1.0 - p) / 2.0;
            let want = p.powf(-0.5) * q * (q - 1.0) * t.powf(q - 2.0);
            assert_relative_eq!(
                rep.second_derivative(t).unwrap(),
                want,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn sign_pattern_examples() {
        let neg_recip = parse("-(1 / x) on (0,inf)").unwrap();
        let r = sign_pattern_check(
            &neg_recip,
            2,
            MatrixKind::Monotone,
            &[0.5, 1.0, 2.0],
            DEFAULT_SIGN_TOL,
        )
        .unwrap();
        assert!(r.pass);

        let sq = parse("poly[0,0,1] on (0,inf)").unwrap();
        let r = sign_pattern_check(
            &sq,
            2,
            MatrixKind::Monotone,
            &[0.5, 1.0, 2.0],
            DEFAULT_SIGN_TOL,
        )
        .unwrap();
        assert!(!r.pass, "f'' = 2 violates (-1)^1 f'' >= 0");
        assert!(r
            .main
            .iter()
            .any(|c| c.order == 2 && !c.pass && !c.expected_nonneg));

        let soft = parse("x - log(1+x) on (0,inf)").unwrap();
        let r = sign_pattern_check(
            &soft,
            2,
            MatrixKind::Convex,
            &[0.5, 1.0, 2.0],
            DEFAULT_SIGN_TOL,
        )
        .unwrap();
        assert!(r.pass);
    }

    #[test]
    fn sign_pattern_requires_half_infinite_domain() {
        let f = parse("x on (0,1)").unwrap();
        let err = sign_pattern_check(&f, 2, MatrixKind::Monotone, &[0.5], DEFAULT_SIGN_TOL)
            .unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn sign_pattern_operator_monotone_suite() {
        let suite = [
            "-(1 / x) on (0,inf)",
            "log(1+x) on (0,inf)",
            "x^0.5 on (0,inf)",
            "x / (1 + x) on (0,inf)",
        ];
        for text in suite {
            let f = parse(text).unwrap();
            let samples = f.domain.interior_grid(40);
            for n in [2usize, 3] {
                let r =
                    sign_pattern_check(&f, n, MatrixKind::Monotone, &samples, DEFAULT_SIGN_TOL)
                        .unwrap();
                assert!(r.pass, "{text} n={n}");
            }
        }
    }

    #[test]
    fn rigidity_scan_examples() {
        let e = parse("exp(x)").unwrap();
        let r = whole_line_rigidity_scan(&e, MatrixKind::Convex, 20).unwrap();
        let w = r.witness.expect("exp has D_2 < 0 everywhere");
        assert!(w.radius <= 1.0);
        assert_relative_eq!(
            w.verdict.minors[1],
            -(2.0 * w.t).exp() / 144.0,
            max_relative = 1e-10
        );

        let affine = parse("poly[1,2]").unwrap();
        let r = whole_line_rigidity_scan(&affine, MatrixKind::Monotone, 20).unwrap();
        assert!(r.witness.is_none());
        assert_eq!(r.rows.len(), 21);

        let quad = parse("poly[1,0,1]").unwrap();
        let r = whole_line_rigidity_scan(&quad, MatrixKind::Convex, 20).unwrap();
        assert!(r.witness.is_none());
    }

    #[test]
    fn rigidity_scan_finds_cube_monotone_witness() {
        let r = whole_line_rigidity_scan(&cube(), MatrixKind::Monotone, 20).unwrap();
        assert!(r.witness.is_some(), "Dobsch det of t^3 is -6t^2");
    }

    #[test]
    fn rigidity_scan_rejects_bounded_domain() {
        let f = parse("exp(x) on (0,1)").unwrap();
        assert!(whole_line_rigidity_scan(&f, MatrixKind::Convex, 4).is_err());
    }

    #[test]
    fn antiderivative_examples() {
        let mobius = parse("x / (1 + x) on (0,10)").unwrap();
        assert!(antiderivative_convexity(&mobius, 129).unwrap().pass);

        let one = parse("poly[1] on (0,10)").unwrap();
        let r = antiderivative_convexity(&one, 129).unwrap();
        assert!(r.pass);
        assert_eq!(r.worst.classification, Classification::BoundaryPsd);

        let sqrt = parse("x^0.5 on (0.1,9)").unwrap();
        assert!(antiderivative_convexity(&sqrt, 129).unwrap().pass);
    }

    #[test]
    fn antiderivative_rejects_nonmonotone() {
        let cube = parse("poly[0,0,0,1] on (0.1,2)").unwrap();
        let err = antiderivative_convexity(&cube, 33).unwrap_err();
        assert!(matches!(err, Error::NotMonotone { .. }));
    }

    #[test]
    fn affine_invariance_of_verdicts() {
        use crate::expr::Expr;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let suite = ["x^0.5 on (0.1,4)", "poly[0,0,0,1] on (0.1,4)"];
        for text in suite {
            let f = parse(text).unwrap();
            for _ in 0..5 {
                let a: f64 = rng.gen_range(0.1..5.0);
                let b: f64 = rng.gen_range(-3.0..3.0);
                let scaled = FunctionSpec::new(
                    Expr::sum(vec![
                        Expr::product(vec![Expr::constant(a), f.expr.clone()]),
                        Expr::constant(b),
                    ]),
                    f.domain,
                );
                for kind in [MatrixKind::Monotone, MatrixKind::Convex] {
                    let r0 = grid_classify(&f, 2, kind, 33, DEFAULT_PSD_TOL).unwrap();
                    let r1 = grid_classify(&scaled, 2, kind, 33, DEFAULT_PSD_TOL).unwrap();
                    assert_eq!(r0.pass, r1.pass, "{text} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn scale_covariance_of_kraus() {
        use crate::expr::Expr;
        let f = parse("exp(x) * x^0.5 on (0,inf)").unwrap();
        let s = 2.5f64;
        let t0 = 0.8f64;
        let n = 3usize;
        let scaled = FunctionSpec::new(
            f.expr
                .substitute(&Expr::product(vec![Expr::constant(s), Expr::var()])),
            crate::interval::Interval::positive_axis(),
        );
        let lhs = kraus_matrix(&scaled, t0, n).unwrap();
        let rhs = kraus_matrix(&f, s * t0, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let want = s.powi((i + 1) as i32) * rhs.entry(i, j) * s.powi((j + 1) as i32);
                assert_relative_eq!(lhs.entry(i, j), want, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn minor_eigen_coherence() {
        let suite = [
            "x^0.5 on (0.1,4)",
            "poly[0,0,0,1] on (0.1,4)",
            "exp(x) on (0.1,4)",
            "1 / x on (0.1,4)",
            "x - log(1+x) on (0.1,4)",
        ];
        for text in suite {
            let f = parse(text).unwrap();
            for kind in [MatrixKind::Monotone, MatrixKind::Convex] {
                for t in f.domain.interior_grid(17) {
                    let m = derivative_matrix(&f, t, 2, kind).unwrap();
                    let v = psd_test(&m, DEFAULT_PSD_TOL);
                    let all_minors_positive = v.minors.iter().all(|d| *d > v.tolerance);
                    if all_minors_positive {
                        assert_eq!(
                            v.classification,
                            Classification::PositiveDefinite,
                            "{text} {kind:?} t={t}: minors {:?} vs eig {}",
                            v.minors,
                            v.min_eigenvalue
                        );
                    }
                    if v.classification == Classification::PositiveDefinite {
                        assert!(
                            v.minors.iter().all(|d| *d > 0.0),
                            "{text} {kind:?} t={t}"
                        );
                    }
                }
            }
        }
    }
}
