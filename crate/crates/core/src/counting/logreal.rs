//! Nonnegative reals carried as natural logarithms with a running error bound.

use std::ops::{Div, Mul};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

const EPS: f64 = f64::EPSILON;

/// `exp(log)`, with `err` an absolute bound on the rounding error accumulated
/// in `log`. Zero is `log = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogReal {
    log: f64,
    err: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        log: f64::NEG_INFINITY,
        err: 0.0,
    };

    pub const ONE: LogReal = LogReal { log: 0.0, err: 0.0 };

    pub fn from_log(log: f64) -> Self {
        LogReal { log, err: 0.0 }
    }

    pub fn from_log_with_error(log: f64, err: f64) -> Self {
        LogReal { log, err }
    }

    /// Natural log of an exact count.
    pub fn from_count(c: &BigUint) -> Self {
        let bits = c.bits();
        if bits == 0 {
            return LogReal::ZERO;
        }
        let log = if bits <= 53 {
            c.to_f64().expect("fits").ln()
        } else {
            let shift = bits - 64;
            let top = (c >> shift).to_u64().expect("64 bits");
            (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
        };
        LogReal {
            log,
            err: 2.0 * EPS * (1.0 + log.abs()),
        }
    }

    pub fn log(&self) -> f64 {
        self.log
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn is_zero(&self) -> bool {
        self.log == f64::NEG_INFINITY
    }

    pub fn to_f64(&self) -> f64 {
        self.log.exp()
    }

    /// `self^theta`.
    pub fn powf(self, theta: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        let log = self.log * theta;
        LogReal {
            log,
            err: self.err * theta.abs() + EPS * log.abs(),
        }
    }

    /// Log-sum-exp over `terms` in the given order, with Neumaier compensation.
    pub fn sum(terms: &[LogReal]) -> Self {
        let max = terms
            .iter()
            .map(|t| t.log)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return LogReal::ZERO;
        }
        let mut s = 0.0f64;
        let mut c = 0.0f64;
        let mut err_in = 0.0f64;
        let mut k = 0usize;
        for t in terms {
            if t.is_zero() {
                continue;
            }
            k += 1;
            err_in = err_in.max(t.err);
            let x = (t.log - max).exp();
            let u = s + x;
            if s.abs() >= x.abs() {
                c += (s - u) + x;
            } else {
                c += (x - u) + s;
            }
            s = u;
        }
        let ln_s = (s + c).ln();
        let log = max + ln_s;
        let err = err_in + EPS * ((2 * k + 3) as f64 + ln_s.abs() + log.abs());
        LogReal { log, err }
    }
}

/// Product of two values.
impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, other: LogReal) -> LogReal {
        if self.is_zero() || other.is_zero() {
            return LogReal::ZERO;
        }
        let log = self.log + other.log;
        LogReal {
            log,
            err: self.err + other.err + EPS * log.abs(),
        }
    }
}

/// Quotient of two values; the divisor must be nonzero.
impl Div for LogReal {
    type Output = LogReal;

    fn div(self, other: LogReal) -> LogReal {
        debug_assert!(!other.is_zero());
        if self.is_zero() {
            return self;
        }
        let log = self.log - other.log;
        LogReal {
            log,
            err: self.err + other.err + EPS * log.abs(),
        }
    }
}
