//! Truncated power-series (jet) arithmetic.
//!
//! A jet holds the normalized Taylor coefficients `a_k = f^(k)(t0) / k!` of a
//! function at a point. Working with normalized coefficients means Hankel
//! matrix entries are read off directly and no factorial ever materializes in
//! an intermediate.

use crate::error::{Error, Result};
use crate::expr::{is_integer, Expr, FunctionSpec};

/// Hard cap on jet order.
pub const ORDER_CAP: usize = 64;

/// Normalized Taylor coefficients of a function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_k = f^(k)(t0) / k!`.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Raw derivative `f^(k)(t0) = k! * a_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut factorial = 1.0;
        for i in 1..=k {
            factorial *= i as f64;
        }
        factorial * self.coeff(k)
    }

    /// Jet of the derivative function f' at the same point, one order lower.
    pub fn derivative_jet(&self) -> Jet {
        let order = self.order().saturating_sub(1);
        let coeffs = (0..=order)
            .map(|k| (k as f64 + 1.0) * self.coeff(k + 1))
            .collect();
        Jet {
            base: self.base,
            coeffs,
        }
    }
}

fn check_order(k: usize) -> Result<()> {
    if k > ORDER_CAP {
        return Err(Error::OrderCap {
            requested: k,
            cap: ORDER_CAP,
        });
    }
    Ok(())
}

/// Lift a function to its jet of order `order` at `t0`.
pub fn jet_lift(f: &FunctionSpec, t0: f64, order: usize) -> Result<Jet> {
    check_order(order)?;
    if !f.domain.contains_interior(t0) {
        return Err(Error::Domain {
            t: t0,
            reason: format!("outside domain {}", f.domain),
        });
    }
    let coeffs = lift(&f.expr, t0, order)?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain {
            t: t0,
            reason: "jet coefficient overflowed".into(),
        });
    }
    Ok(Jet { base: t0, coeffs })
}

/// `f^(k)(t)` by jet lifting.
pub fn derivative(f: &FunctionSpec, t: f64, k: usize) -> Result<f64> {
    Ok(jet_lift(f, t, k)?.derivative(k))
}

/// Central-difference estimate of `f^(k)(t)` with one Richardson step.
///
/// The raw stencil has error `O(h^2)`; the Richardson combination removes
/// that term, leaving `O(h^4)` truncation plus `O(eps / h^k)` rounding.
pub fn finite_difference_oracle(f: &FunctionSpec, t: f64, k: usize, h: f64) -> Result<f64> {
    if k > 6 {
        return Err(Error::Precondition(format!(
            "finite differences support k <= 6, got {k}"
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Precondition("step h must be positive".into()));
    }
    let coarse = central_difference(f, t, k, h)?;
    let fine = central_difference(f, t, k, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn central_difference(f: &FunctionSpec, t: f64, k: usize, h: f64) -> Result<f64> {
    if k == 0 {
        return f.evaluate(t);
    }
    let mut binom = 1.0;
    let mut acc = 0.0;
    for j in 0..=k {
        if j > 0 {
            binom *= (k - j + 1) as f64 / j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let offset = (0.5 * k as f64 - j as f64) * h;
        acc += sign * binom * f.evaluate(t + offset)?;
    }
    Ok(acc / h.powi(k as i32))
}

/// Jet of the antiderivative `g(t) = ∫ f`, with `b_0 = 0` by convention and
/// `b_{k+1} = a_k / (k+1)`.
pub fn antiderivative_jet(j: &Jet) -> Result<Jet> {
    check_order(j.order() + 1)?;
    let mut coeffs = vec![0.0; j.order() + 2];
    for k in 0..=j.order() {
        coeffs[k + 1] = j.coeff(k) / (k as f64 + 1.0);
    }
    Ok(Jet {
        base: j.base,
        coeffs,
    })
}

// ---------------------------------------------------------------------------
// Series kernels. All vectors hold normalized coefficients of equal length.
// ---------------------------------------------------------------------------

fn lift(e: &Expr, t0: f64, order: usize) -> Result<Vec<f64>> {
    let n = order + 1;
    let bad = |reason: &str| Error::Domain {
        t: t0,
        reason: reason.into(),
    };
    Ok(match e {
        Expr::Const(c) => {
            let mut v = vec![0.0; n];
            v[0] = *c;
            v
        }
        Expr::Var => {
            let mut v = vec![0.0; n];
            v[0] = t0;
            if n > 1 {
                v[1] = 1.0;
            }
            v
        }
        Expr::Sum(ts) => {
            let mut acc = vec![0.0; n];
            for term in ts {
                let u = lift(term, t0, order)?;
                for (a, b) in acc.iter_mut().zip(&u) {
                    *a += b;
                }
            }
            acc
        }
        Expr::Product(fs) => {
            let mut acc = vec![0.0; n];
            acc[0] = 1.0;
            for factor in fs {
                let u = lift(factor, t0, order)?;
                acc = mul_series(&acc, &u);
            }
            acc
        }
        Expr::Negate(inner) => {
            let mut u = lift(inner, t0, order)?;
            for c in &mut u {
                *c = -*c;
            }
            u
        }
        Expr::Reciprocal(inner) => {
            let u = lift(inner, t0, order)?;
            recip_series(&u).ok_or_else(|| bad("reciprocal of zero"))?
        }
        Expr::Power(inner, p) => {
            let u = lift(inner, t0, order)?;
            if is_integer(*p) {
                let m = *p as i64;
                if m >= 0 {
                    int_pow_series(&u, m as u64)
                } else {
                    let pos = int_pow_series(&u, (-m) as u64);
                    recip_series(&pos).ok_or_else(|| bad("negative power of zero"))?
                }
            } else {
                pow_series(&u, *p).ok_or_else(|| bad("fractional power of a nonpositive value"))?
            }
        }
        Expr::Exp(inner) => exp_series(&lift(inner, t0, order)?),
        Expr::Log(inner) => {
            let u = lift(inner, t0, order)?;
            log_series(&u).ok_or_else(|| bad("log of a nonpositive value"))?
        }
        Expr::Polynomial(cs) => {
            // Horner over jets; exact zero tails for polynomial inputs.
            let mut x = vec![0.0; n];
            x[0] = t0;
            if n > 1 {
                x[1] = 1.0;
            }
            let mut acc = vec![0.0; n];
            acc[0] = *cs.last().unwrap_or(&0.0);
            for c in cs.iter().rev().skip(1) {
                acc = mul_series(&acc, &x);
                acc[0] += c;
            }
            acc
        }
    })
}

/// Truncated Cauchy product.
pub(crate) fn mul_series(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for (i, ai) in a.iter().enumerate() {
        if *ai == 0.0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn int_pow_series(u: &[f64], mut m: u64) -> Vec<f64> {
    let n = u.len();
    let mut result = vec![0.0; n];
    result[0] = 1.0;
    let mut base = u.to_vec();
    while m > 0 {
        if m & 1 == 1 {
            result = mul_series(&result, &base);
        }
        m >>= 1;
        if m > 0 {
            base = mul_series(&base, &base);
        }
    }
    result
}

pub(crate) fn recip_series(u: &[f64]) -> Option<Vec<f64>> {
    if u[0] == 0.0 {
        return None;
    }
    let n = u.len();
    let mut r = vec![0.0; n];
    r[0] = 1.0 / u[0];
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..=k {
            s += u[j] * r[k - j];
        }
        r[k] = -s / u[0];
    }
    Some(r)
}

fn exp_series(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut e = vec![0.0; n];
    e[0] = u[0].exp();
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..=k {
            s += j as f64 * u[j] * e[k - j];
        }
        e[k] = s / k as f64;
    }
    e
}

fn log_series(u: &[f64]) -> Option<Vec<f64>> {
    if u[0] <= 0.0 {
        return None;
    }
    let n = u.len();
    let mut l = vec![0.0; n];
    l[0] = u[0].ln();
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..k {
            s += j as f64 * l[j] * u[k - j];
        }
        l[k] = (u[k] - s / k as f64) / u[0];
    }
    Some(l)
}

/// `u^p` for real (non-integer) exponents; needs `u_0 > 0`.
pub(crate) fn pow_series(u: &[f64], p: f64) -> Option<Vec<f64>> {
    if u[0] <= 0.0 {
        return None;
    }
    let n = u.len();
    let mut v = vec![0.0; n];
    v[0] = u[0].powf(p);
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..=k {
            s += p * j as f64 * u[j] * v[k - j];
        }
        for j in 1..k {
            s -= j as f64 * v[j] * u[k - j];
        }
        v[k] = s / (k as f64 * u[0]);
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::parse::parse;
    use approx::assert_relative_eq;

    fn lift_text(text: &str, t0: f64, order: usize) -> Jet {
        jet_lift(&parse(text).unwrap(), t0, order).unwrap()
    }

    #[test]
    fn exp_jet_at_zero() {
        let j = lift_text("exp(x)", 0.0, 4);
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (k, w) in want.iter().enumerate() {
            assert_relative_eq!(j.coeff(k), *w, max_relative = 1e-15);
        }
    }

    #[test]
    fn cube_jet_is_binomial() {
        let j = lift_text("poly[0,0,0,1]", 1.0, 4);
        assert_eq!(j.coeffs(), &[1.0, 3.0, 3.0, 1.0, 0.0]);
    }

    #[test]
    fn sqrt_jet_at_one() {
        let j = lift_text("x^0.5 on (0,inf)", 1.0, 3);
        let want = [1.0, 0.5, -0.125, 0.0625];
        for (k, w) in want.iter().enumerate() {
            assert_relative_eq!(j.coeff(k), *w, max_relative = 1e-13);
        }
        // Independent check of the same coefficients by finite differences,
        // with the step balancing truncation against rounding per order.
        let f = parse("x^0.5 on (0,inf)").unwrap();
        for (k, h) in [(1usize, 5e-3), (2, 1e-2), (3, 2e-2)] {
            let fd = finite_difference_oracle(&f, 1.0, k, h).unwrap();
            let mut factorial = 1.0;
            for i in 1..=k {
                factorial *= i as f64;
            }
            assert_relative_eq!(j.coeff(k), fd / factorial, max_relative = 1e-6);
        }
    }

    #[test]
    fn derivative_values() {
        let f = parse("x^0.5 on (0,inf)").unwrap();
        assert_relative_eq!(derivative(&f, 1.0, 1).unwrap(), 0.5, max_relative = 1e-13);

        let g = parse("1 / x on (0,inf)").unwrap();
        assert_relative_eq!(
            derivative(&g, 2.0, 3).unwrap(),
            -0.375,
            max_relative = 1e-13
        );
        // k = 0 reduces to plain evaluation.
        assert_eq!(derivative(&g, 2.0, 0).unwrap(), g.evaluate(2.0).unwrap());
    }

    #[test]
    fn order_cap_enforced() {
        let f = parse("exp(x)").unwrap();
        assert!(matches!(
            jet_lift(&f, 0.0, 65),
            Err(Error::OrderCap { .. })
        ));
    }

    #[test]
    fn fd_oracle_examples() {
        let sq = parse("poly[0,0,1]").unwrap();
        assert!((finite_difference_oracle(&sq, 1.0, 2, 1e-3).unwrap() - 2.0).abs() < 1e-8);

        let e = parse("exp(x)").unwrap();
        assert!((finite_difference_oracle(&e, 0.0, 3, 1e-2).unwrap() - 1.0).abs() < 1e-4);

        let r = parse("x^0.5 on (0,inf)").unwrap();
        assert!((finite_difference_oracle(&r, 1.0, 2, 1e-3).unwrap() + 0.25).abs() < 1e-6);
    }

    #[test]
    fn fd_oracle_rejects_high_order() {
        let f = parse("exp(x)").unwrap();
        assert!(finite_difference_oracle(&f, 0.0, 7, 1e-2).is_err());
    }

    #[test]
    fn antiderivative_of_constant_and_identity() {
        let one = lift_text("poly[1]", 0.0, 2);
        let t = antiderivative_jet(&one).unwrap();
        assert_eq!(t.coeffs(), &[0.0, 1.0, 0.0, 0.0]);

        let ident = lift_text("x", 0.0, 1);
        let half_sq = antiderivative_jet(&ident).unwrap();
        assert_eq!(half_sq.coeffs(), &[0.0, 0.0, 0.5]);
    }

    #[test]
    fn antiderivative_matches_closed_form() {
        // ∫ t/(1+t) = t - log(1+t) up to a constant.
        let f = parse("x / (1 + x) on (-0.5,inf)").unwrap();
        let g = parse("x - log(1+x) on (-0.5,inf)").unwrap();
        let fj = jet_lift(&f, 1.0, 3).unwrap();
        let gj = jet_lift(&g, 1.0, 4).unwrap();
        let anti = antiderivative_jet(&fj).unwrap();
        for k in 1..=4 {
            assert_relative_eq!(anti.coeff(k), gj.coeff(k), max_relative = 1e-13);
        }
    }

    #[test]
    fn antiderivative_shift_back_is_exact() {
        let j = lift_text("exp(x) * x - log(1+x) on (0,4)", 1.0, 6);
        let anti = antiderivative_jet(&j).unwrap();
        let back = anti.derivative_jet();
        assert_eq!(back.coeffs(), j.coeffs());
    }

    #[test]
    fn polynomial_jets_have_exact_zero_tails() {
        let j = lift_text("poly[2,-3,0.5,0,7]", 0.75, 12);
        for k in 5..=12 {
            assert_eq!(j.coeff(k), 0.0);
        }
    }

    #[test]
    fn linearity_and_leibniz() {
        let f = parse("exp(x) on (0,4)").unwrap();
        let g = parse("x^0.5 on (0,4)").unwrap();
        let t0 = 1.3;
        let order = 8;
        let jf = jet_lift(&f, t0, order).unwrap();
        let jg = jet_lift(&g, t0, order).unwrap();

        // alpha*f + beta*g
        let (alpha, beta) = (2.5, -0.75);
        let combo = FunctionSpec::new(
            Expr::sum(vec![
                Expr::product(vec![Expr::Const(alpha), f.expr.clone()]),
                Expr::product(vec![Expr::Const(beta), g.expr.clone()]),
            ]),
            Interval::open(0.0, 4.0).unwrap(),
        );
        let jc = jet_lift(&combo, t0, order).unwrap();
        for k in 0..=order {
            assert_relative_eq!(
                jc.coeff(k),
                alpha * jf.coeff(k) + beta * jg.coeff(k),
                max_relative = 1e-13,
                epsilon = 1e-13
            );
        }

        // f * g against the convolution of the two jets
        let prod = FunctionSpec::new(
            Expr::product(vec![f.expr.clone(), g.expr.clone()]),
            Interval::open(0.0, 4.0).unwrap(),
        );
        let jp = jet_lift(&prod, t0, order).unwrap();
        let conv = mul_series(jf.coeffs(), jg.coeffs());
        for k in 0..=order {
            assert_relative_eq!(jp.coeff(k), conv[k], max_relative = 1e-13, epsilon = 1e-13);
        }
    }

    #[test]
    fn derivative_agrees_with_fd_across_suite() {
        // (function, distance of t to the nearest singularity, extra step
        // factor for orders 5 and 6); the step is scaled by the distance so
        // the truncation term stays balanced across points.
        let suite: [(&str, fn(f64) -> f64, f64); 5] = [
            ("x^0.5 on (0,inf)", |t| t, 0.5),
            ("log(1+x) on (0,inf)", |t| 1.0 + t, 0.5),
            ("x / (1 + x) on (0,inf)", |t| 1.0 + t, 0.5),
            ("exp(x) on (-inf,inf)", |_| 1.0, 1.5),
            ("-(1 / x) on (0,inf)", |t| t, 0.5),
        ];
        // One Richardson step over a k-th central difference bottoms out
        // near 1e-5 relative at k = 5, 6 for non-polynomial functions, so
        // the asserted bound widens with the order.
        let hs = [1e-3, 5e-3, 5e-3, 1e-2, 2e-2, 4e-2, 6e-2];
        let tols = [1e-9, 1e-6, 1e-6, 1e-6, 1e-6, 2e-5, 2e-4];
        for (text, scale, mult56) in suite {
            let f = parse(text).unwrap();
            for t in [1.1, 1.7, 2.3] {
                for k in 0..=6usize {
                    let h = hs[k] * scale(t) * if k >= 5 { mult56 } else { 1.0 };
                    let d = derivative(&f, t, k).unwrap();
                    let fd = finite_difference_oracle(&f, t, k, h).unwrap();
                    assert!(
                        (d - fd).abs() <= tols[k] * d.abs().max(1.0),
                        "{text} k={k} t={t}: jet {d} vs fd {fd}"
                    );
                }
            }
        }
    }
}
