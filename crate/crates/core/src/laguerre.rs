//! Laguerre polynomials by three-term recurrence.
//!
//! `L_0 = 1`, `L_1 = 1 - y`, `(n+1) L_{n+1} = (2n+1-y) L_n - n L_{n-1}`.
//! The complement `G_n = 1 - L_n` obeys
//! `(n+1) G_{n+1} = y + (2n+1-y) G_n - n G_{n-1}` with `G_0 = 0`, `G_1 = y`,
//! which keeps full relative precision when `y` is tiny and `L_n` sits next
//! to one.

/// `L_n(y)`.
pub fn laguerre(n: usize, y: f64) -> f64 {
    LaguerreSeq::new(y).nth(n).map(|t| t.value).unwrap_or(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreTerm {
    pub n: usize,
    /// `L_n(y)`
    pub value: f64,
    /// `1 - L_n(y)`
    pub complement: f64,
}

/// Endless sequence `L_0(y), L_1(y), ...` together with their complements.
#[derive(Debug, Clone)]
pub struct LaguerreSeq {
    y: f64,
    n: usize,
    prev: (f64, f64),
    cur: (f64, f64),
}

impl LaguerreSeq {
    pub fn new(y: f64) -> Self {
        Self {
            y,
            n: 0,
            prev: (f64::NAN, f64::NAN),
            cur: (1.0, 0.0),
        }
    }
}

impl Iterator for LaguerreSeq {
    type Item = LaguerreTerm;

    fn next(&mut self) -> Option<LaguerreTerm> {
        let out = LaguerreTerm {
            n: self.n,
            value: self.cur.0,
            complement: self.cur.1,
        };
        let y = self.y;
        let next = if self.n == 0 {
            (1.0 - y, y)
        } else {
            let n = self.n as f64;
            let a = 2.0 * n + 1.0 - y;
            (
                (a * self.cur.0 - n * self.prev.0) / (n + 1.0),
                (y + a * self.cur.1 - n * self.prev.1) / (n + 1.0),
            )
        };
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.carry
    }
}
