use crate::error::{Error, Result};
use crate::interval::Interval;

/// Closed-form expression tree in one variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Negate(Box<Expr>),
    Reciprocal(Box<Expr>),
    /// `base^p` with a real exponent.
    Power(Box<Expr>, f64),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    /// Polynomial in the variable, coefficients in ascending degree order.
    Polynomial(Vec<f64>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms)
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        Expr::Product(factors)
    }

    pub fn neg(self) -> Expr {
        Expr::Negate(Box::new(self))
    }

    pub fn recip(self) -> Expr {
        Expr::Reciprocal(Box::new(self))
    }

    pub fn pow(self, p: f64) -> Expr {
        Expr::Power(Box::new(self), p)
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn log(self) -> Expr {
        Expr::Log(Box::new(self))
    }

    pub fn poly(coeffs: Vec<f64>) -> Expr {
        Expr::Polynomial(coeffs)
    }

    /// Replace the variable by `inner` everywhere, producing `self ∘ inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var => inner.clone(),
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| t.substitute(inner)).collect()),
            Expr::Product(fs) => Expr::Product(fs.iter().map(|f| f.substitute(inner)).collect()),
            Expr::Negate(e) => Expr::Negate(Box::new(e.substitute(inner))),
            Expr::Reciprocal(e) => Expr::Reciprocal(Box::new(e.substitute(inner))),
            Expr::Power(e, p) => Expr::Power(Box::new(e.substitute(inner)), *p),
            Expr::Exp(e) => Expr::Exp(Box::new(e.substitute(inner))),
            Expr::Log(e) => Expr::Log(Box::new(e.substitute(inner))),
            Expr::Polynomial(cs) => {
                // Horner form keeps the result a plain tree.
                let mut acc = Expr::Const(*cs.last().unwrap_or(&0.0));
                for c in cs.iter().rev().skip(1) {
                    acc = Expr::Sum(vec![
                        Expr::Const(*c),
                        Expr::Product(vec![inner.clone(), acc]),
                    ]);
                }
                acc
            }
        }
    }

    fn eval_inner(&self, t: f64) -> Result<f64> {
        let bad = |reason: &str| Error::Domain {
            t,
            reason: reason.into(),
        };
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Sum(ts) => {
                let mut acc = 0.0;
                for term in ts {
                    acc += term.eval_inner(t)?;
                }
                acc
            }
            Expr::Product(fs) => {
                let mut acc = 1.0;
                for f in fs {
                    acc *= f.eval_inner(t)?;
                }
                acc
            }
            Expr::Negate(e) => -e.eval_inner(t)?,
            Expr::Reciprocal(e) => {
                let v = e.eval_inner(t)?;
                if v == 0.0 {
                    return Err(bad("reciprocal of zero"));
                }
                1.0 / v
            }
            Expr::Power(e, p) => {
                let v = e.eval_inner(t)?;
                if is_integer(*p) {
                    if v == 0.0 && *p < 0.0 {
                        return Err(bad("negative power of zero"));
                    }
                    v.powi(*p as i32)
                } else {
                    if v <= 0.0 {
                        return Err(bad("fractional power of a nonpositive value"));
                    }
                    v.powf(*p)
                }
            }
            Expr::Exp(e) => e.eval_inner(t)?.exp(),
            Expr::Log(e) => {
                let v = e.eval_inner(t)?;
                if v <= 0.0 {
                    return Err(bad("log of a nonpositive value"));
                }
                v.ln()
            }
            Expr::Polynomial(cs) => {
                let mut acc = 0.0;
                for c in cs.iter().rev() {
                    acc = acc * t + c;
                }
                acc
            }
        })
    }
}

pub(crate) fn is_integer(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() <= i32::MAX as f64
}

/// A scalar function together with its interval of definition.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub expr: Expr,
    pub domain: Interval,
    pub label: String,
}

impl FunctionSpec {
    /// Build a spec; the label defaults to the canonical printed form.
    pub fn new(expr: Expr, domain: Interval) -> Self {
        let mut spec = Self {
            expr,
            domain,
            label: String::new(),
        };
        spec.label = spec.to_string();
        spec
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `t^p` on the given domain.
    pub fn power(p: f64, domain: Interval) -> Self {
        Self::new(Expr::Var.pow(p), domain)
    }

    /// Polynomial from ascending coefficients.
    pub fn polynomial(coeffs: Vec<f64>, domain: Interval) -> Self {
        Self::new(Expr::poly(coeffs), domain)
    }

    /// Evaluate at an interior point of the domain.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !self.domain.contains_interior(t) {
            return Err(Error::Domain {
                t,
                reason: format!("outside domain {}", self.domain),
            });
        }
        let v = self.expr.eval_inner(t)?;
        if !v.is_finite() {
            return Err(Error::Domain {
                t,
                reason: "evaluation overflowed".into(),
            });
        }
        Ok(v)
    }

    /// Probe evaluability on an interior grid of at least 64 points.
    ///
    /// Returns `Ok(())` or the first failing probe.
    pub fn domain_check(&self) -> std::result::Result<(), DomainViolation> {
        for t in self.domain.interior_grid(64) {
            if let Err(err) = self.evaluate(t) {
                return Err(DomainViolation { t, error: err });
            }
        }
        Ok(())
    }
}

/// First failing probe point reported by [`FunctionSpec::domain_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct DomainViolation {
    pub t: f64,
    pub error: Error,
}
