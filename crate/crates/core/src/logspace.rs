//! Log-space arithmetic with `-inf` as the zero-probability sentinel.

pub const NEG_INF: f64 = f64::NEG_INFINITY;

/// `ln x`, mapping 0 to `-inf`.
pub fn ln(x: f64) -> f64 {
    if x <= 0.0 {
        NEG_INF
    } else {
        x.ln()
    }
}

/// `ln Σ exp(v)` with max shift; an all `-inf` input yields `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(NEG_INF, f64::max);
    if m == NEG_INF {
        return NEG_INF;
    }
    if m == f64::INFINITY {
        return m;
    }
    let s: f64 = values.iter().map(|v| (v - m).exp()).sum();
    m + s.ln()
}

/// Streaming accumulator for `ln Σ exp(v)`.
#[derive(Debug, Clone, Copy)]
pub struct LogAccumulator {
    max: f64,
    scaled: f64,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        Self {
            max: NEG_INF,
            scaled: 0.0,
        }
    }
}

impl LogAccumulator {
    pub fn add(&mut self, v: f64) {
        if v == NEG_INF {
            return;
        }
        if v <= self.max {
            self.scaled += (v - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == NEG_INF {
            NEG_INF
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Subtracts the log normalizer in place and returns it.
/// An all `-inf` row is left untouched and `-inf` is returned.
pub fn log_normalize(values: &mut [f64]) -> f64 {
    let z = log_sum_exp(values);
    if z.is_finite() {
        for v in values.iter_mut() {
            *v -= z;
        }
    }
    z
}

/// `a - b` under the convention `(-inf) - (-inf) = 0`.
pub fn log_ratio(a: f64, b: f64) -> f64 {
    if a == NEG_INF && b == NEG_INF {
        0.0
    } else {
        a - b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct_sum() {
        let v = [0.1f64.ln(), 0.2f64.ln(), 0.7f64.ln()];
        assert!((log_sum_exp(&v)).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[NEG_INF, NEG_INF]), NEG_INF);
        assert_eq!(log_sum_exp(&[]), NEG_INF);
    }

    #[test]
    fn lse_survives_tiny_values() {
        let v = [-1000.0, -1000.0];
        assert!((log_sum_exp(&v) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn accumulator_agrees_with_batch() {
        let v = [-3.0, NEG_INF, 2.5, -0.25, 2.5];
        let mut acc = LogAccumulator::default();
        for x in v {
            acc.add(x);
        }
        assert!((acc.value() - log_sum_exp(&v)).abs() < 1e-14);
        assert_eq!(LogAccumulator::default().value(), NEG_INF);
    }

    #[test]
    fn normalize_and_ratio_conventions() {
        let mut v = [0.0, 0.0, NEG_INF, 0.0, 0.0];
        let z = log_normalize(&mut v);
        assert!((z - 4f64.ln()).abs() < 1e-15);
        assert!((v[0] - 0.25f64.ln()).abs() < 1e-15);
        assert_eq!(v[2], NEG_INF);
        assert_eq!(log_ratio(NEG_INF, NEG_INF), 0.0);
        assert_eq!(log_ratio(NEG_INF, 0.0), NEG_INF);
        assert_eq!(ln(0.0), NEG_INF);
    }
}
