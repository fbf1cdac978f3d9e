//! Divided differences and the Kraus second-difference matrix, plus the
//! Loewner first-difference matrix used as the divided-difference route for
//! monotonicity.

use crate::criteria::{psd_verdict, PsdVerdict};
use crate::error::{Error, Result};
use crate::expr::FunctionSpec;
use crate::jet::jet_lift;

/// Divided difference over up to three points; coinciding points take the
/// confluent limits `[t,t]f = f'(t)` and `[t,t,t]f = f''(t)/2` from jets.
pub fn divided_difference(f: &FunctionSpec, points: &[f64]) -> Result<f64> {
    match points {
        [t] => f.evaluate(*t),
        [a, b] => dd2(f, *a, *b),
        [a, b, c] => {
            let mut p = [*a, *b, *c];
            p.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let [a, b, c] = p;
            if a == c {
                // All three coincide.
                return Ok(jet_lift(f, a, 2)?.coeff(2));
            }
            Ok((dd2(f, b, c)? - dd2(f, a, b)?) / (c - a))
        }
        _ => Err(Error::Precondition(format!(
            "divided differences support 1..=3 points, got {}",
            points.len()
        ))),
    }
}

fn dd2(f: &FunctionSpec, a: f64, b: f64) -> Result<f64> {
    if a == b {
        Ok(jet_lift(f, a, 1)?.coeff(1))
    } else {
        Ok((f.evaluate(b)? - f.evaluate(a)?) / (b - a))
    }
}

/// Matrix of anchored second divided differences `[t_i, t_j, t_0] f`.
#[derive(Debug, Clone, PartialEq)]
pub struct DividedDifferenceMatrix {
    pub t0: f64,
    pub points: Vec<f64>,
    /// Row-major, symmetric.
    pub entries: Vec<f64>,
}

/// Build the Kraus divided-difference matrix at anchor `t0` over the given
/// nodes and classify it with the general symmetric PSD engine.
pub fn kraus_divided_matrix(
    f: &FunctionSpec,
    t0: f64,
    points: &[f64],
    tol: f64,
) -> Result<(DividedDifferenceMatrix, PsdVerdict)> {
    let m = points.len();
    if m == 0 || m > 12 {
        return Err(Error::Precondition(format!(
            "node count must be in 1..=12, got {m}"
        )));
    }
    let mut entries = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v = divided_difference(f, &[points[i], points[j], t0])?;
            entries[i * m + j] = v;
            entries[j * m + i] = v;
        }
    }
    let verdict = psd_verdict(&entries, m, tol);
    Ok((
        DividedDifferenceMatrix {
            t0,
            points: points.to_vec(),
            entries,
        },
        verdict,
    ))
}

/// Matrix of first divided differences `[t_i, t_j] f` (Loewner matrix) with
/// `f'(t_i)` on the diagonal; its PSD-ness over node choices is the
/// divided-difference route for matrix monotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerMatrix {
    pub points: Vec<f64>,
    pub entries: Vec<f64>,
}

pub fn loewner_matrix(
    f: &FunctionSpec,
    points: &[f64],
    tol: f64,
) -> Result<(LoewnerMatrix, PsdVerdict)> {
    let m = points.len();
    if m == 0 || m > 12 {
        return Err(Error::Precondition(format!(
            "node count must be in 1..=12, got {m}"
        )));
    }
    let mut entries = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v = dd2(f, points[i], points[j])?;
            entries[i * m + j] = v;
            entries[j * m + i] = v;
        }
    }
    let verdict = psd_verdict(&entries, m, tol);
    Ok((
        LoewnerMatrix {
            points: points.to_vec(),
            entries,
        },
        verdict,
    ))
}
