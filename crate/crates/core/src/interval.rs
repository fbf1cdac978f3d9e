use std::fmt;

use crate::error::{Error, Result};

/// Relative margin by which analysis grids stay away from finite endpoints.
pub const INTERIOR_MARGIN: f64 = 1e-6;

/// An open or half-open real interval, possibly unbounded.
///
/// Infinite endpoints are always open. All analysis in this crate runs on
/// interior points only, so the open/closed flags matter solely for display
/// and for round-tripping parsed input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Precondition("interval endpoint is NaN".into()));
        }
        if !(lo < hi) {
            return Err(Error::Precondition(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        let lo_open = lo_open || lo.is_infinite();
        let hi_open = hi_open || hi.is_infinite();
        Ok(Self {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    /// Open interval (lo, hi).
    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    /// The whole real line.
    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY).unwrap()
    }

    /// The positive half-axis (0, inf).
    pub fn positive_axis() -> Self {
        Self::open(0.0, f64::INFINITY).unwrap()
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_whole_line(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn is_half_infinite_above(&self) -> bool {
        self.lo.is_finite() && self.hi == f64::INFINITY
    }

    /// Strict interior membership; endpoints never count.
    pub fn contains_interior(&self, t: f64) -> bool {
        t.is_finite() && t > self.lo && t < self.hi
    }

    pub fn midpoint(&self) -> f64 {
        if self.is_bounded() {
            0.5 * (self.lo + self.hi)
        } else if self.is_whole_line() {
            0.0
        } else if self.lo.is_finite() {
            self.lo + 1.0
        } else {
            self.hi - 1.0
        }
    }

    /// Interior grid of `size` Chebyshev-spaced points, ascending.
    ///
    /// Finite intervals are shrunk by the relative margin
    /// `INTERIOR_MARGIN * (hi - lo)`. Unbounded intervals are parametrized by
    /// a bounded variable first: `(a, inf)` via `t = a + u/(1-u)` with
    /// `u in (0,1)`, `(-inf, b)` via `t = b - u/(1-u)`, and the whole line via
    /// `t = u/(1-u^2)` with `u in (-1,1)`; the grid is Chebyshev in `u`.
    pub fn interior_grid(&self, size: usize) -> Vec<f64> {
        assert!(size >= 1, "grid size must be at least 1");
        if self.is_bounded() {
            let delta = INTERIOR_MARGIN * (self.hi - self.lo);
            chebyshev(self.lo + delta, self.hi - delta, size)
        } else if self.is_whole_line() {
            chebyshev(-1.0 + 2.0 * INTERIOR_MARGIN, 1.0 - 2.0 * INTERIOR_MARGIN, size)
                .into_iter()
                .map(|u| u / (1.0 - u * u))
                .collect()
        } else if self.lo.is_finite() {
            let lo = self.lo;
            chebyshev(INTERIOR_MARGIN, 1.0 - INTERIOR_MARGIN, size)
                .into_iter()
                .map(|u| lo + u / (1.0 - u))
                .collect()
        } else {
            let hi = self.hi;
            let mut grid: Vec<f64> = chebyshev(INTERIOR_MARGIN, 1.0 - INTERIOR_MARGIN, size)
                .into_iter()
                .map(|u| hi - u / (1.0 - u))
                .collect();
            grid.reverse();
            grid
        }
    }

    /// Bounded window used when sampling matrix spectra from an unbounded
    /// domain. `width` is the total window length.
    pub fn truncate_to_window(&self, width: f64) -> Result<Interval> {
        if width <= 0.0 || !width.is_finite() {
            return Err(Error::UnboundedInterval);
        }
        if self.is_bounded() {
            return Ok(*self);
        }
        if self.is_whole_line() {
            return Interval::open(-0.5 * width, 0.5 * width);
        }
        if self.lo.is_finite() {
            Interval::open(self.lo, self.lo + width)
        } else {
            Interval::open(self.hi - width, self.hi)
        }
    }
}

/// Chebyshev nodes of the first kind on [a, b], ascending. Endpoints are
/// never hit.
fn chebyshev(a: f64, b: f64, size: usize) -> Vec<f64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let n = size as f64;
    (0..size)
        .rev()
        .map(|i| c + h * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) / (2.0 * n)).cos())
        .collect()
}

fn fmt_endpoint(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v == f64::INFINITY {
        write!(f, "inf")
    } else if v == f64::NEG_INFINITY {
        write!(f, "-inf")
    } else {
        write!(f, "{v}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.lo_open { "(" } else { "[" })?;
        fmt_endpoint(self.lo, f)?;
        write!(f, ",")?;
        fmt_endpoint(self.hi, f)?;
        write!(f, "{}", if self.hi_open { ")" } else { "]" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_interval() {
        assert!(Interval::open(1.0, 1.0).is_err());
        assert!(Interval::open(2.0, 1.0).is_err());
    }

    #[test]
    fn infinite_endpoints_are_forced_open() {
        let i = Interval::new(0.0, f64::INFINITY, true, false).unwrap();
        assert!(i.hi_open());
    }

    #[test]
    fn grid_stays_interior_finite() {
        let i = Interval::open(0.1, 4.0).unwrap();
        let g = i.interior_grid(129);
        assert_eq!(g.len(), 129);
        for t in &g {
            assert!(i.contains_interior(*t));
        }
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        // Chebyshev nodes cluster near the endpoints.
        assert!(g[0] < 0.1 + 0.01);
        assert!(g[128] > 4.0 - 0.01);
    }

    #[test]
    fn grid_covers_half_infinite() {
        let i = Interval::positive_axis();
        let g = i.interior_grid(65);
        for t in &g {
            assert!(i.contains_interior(*t));
        }
        assert!(g[0] < 1e-3, "grid reaches close to the finite end");
        assert!(g[64] > 1e3, "grid reaches far out");
    }

    #[test]
    fn grid_covers_whole_line() {
        let g = Interval::real_line().interior_grid(65);
        assert!(g[0] < -1e3);
        assert!(g[64] > 1e3);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn truncation_windows() {
        let w = Interval::positive_axis().truncate_to_window(4.0).unwrap();
        assert_eq!((w.lo(), w.hi()), (0.0, 4.0));
        let w = Interval::real_line().truncate_to_window(4.0).unwrap();
        assert_eq!((w.lo(), w.hi()), (-2.0, 2.0));
        let b = Interval::open(0.1, 9.0).unwrap();
        assert_eq!(b.truncate_to_window(4.0).unwrap(), b);
    }
}
