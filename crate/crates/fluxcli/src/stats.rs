//! Binomial checks against analytic rates.

/// `hits` out of `n` against rate `p`, accepted within `k` standard
/// deviations. Rates of exactly 0 or 1 must be hit exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct RateCheck {
    pub label: String,
    pub hits: usize,
    pub n: usize,
    pub p: f64,
    pub k: f64,
}

impl RateCheck {
    pub fn new(label: impl Into<String>, hits: usize, n: usize, p: f64) -> RateCheck {
        RateCheck {
            label: label.into(),
            hits,
            n,
            p,
            k: 3.0,
        }
    }

    pub fn rate(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.hits as f64 / self.n as f64
        }
    }

    /// Standard deviation of the observed rate.
    pub fn sd(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.p * (1.0 - self.p) / self.n as f64).sqrt()
    }

    pub fn pass(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        (self.rate() - self.p).abs() <= self.k * self.sd() + 1e-12
    }

    pub fn summary(&self) -> String {
        let half = self.k * self.sd();
        format!(
            "{}: observed {:.6} ({}/{}) analytic {:.6} band [{:.6}, {:.6}] ({} sigma)",
            self.label,
            self.rate(),
            self.hits,
            self.n,
            self.p,
            (self.p - half).max(0.0),
            (self.p + half).min(1.0),
            self.k,
        )
    }

    pub fn line(&self) -> String {
        format!("{} [{}]", self.summary(), if self.pass() { "ok" } else { "FAIL" })
    }
}

/// One-sided check: the observed rate may not exceed `bound` by more than
/// `k` standard deviations of a rate at the bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub label: String,
    pub hits: usize,
    pub n: usize,
    pub bound: f64,
    pub k: f64,
}

impl BoundCheck {
    pub fn new(label: impl Into<String>, hits: usize, n: usize, bound: f64) -> BoundCheck {
        BoundCheck {
            label: label.into(),
            hits,
            n,
            bound,
            k: 3.0,
        }
    }

    pub fn pass(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let sd = (self.bound * (1.0 - self.bound) / self.n as f64).sqrt();
        self.hits as f64 / self.n as f64 <= self.bound + self.k * sd
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: observed {:.6} ({}/{}) bound {:.6}",
            self.label,
            if self.n == 0 { 0.0 } else { self.hits as f64 / self.n as f64 },
            self.hits,
            self.n,
            self.bound,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rates_need_exact_hits() {
        assert!(RateCheck::new("x", 10, 10, 1.0).pass());
        assert!(!RateCheck::new("x", 9, 10, 1.0).pass());
        assert!(RateCheck::new("x", 0, 10, 0.0).pass());
        assert!(!RateCheck::new("x", 0, 0, 0.0).pass());
    }

    #[test]
    fn three_sigma_band() {
        // sd = sqrt(0.05 * 0.95 / 10000) ~ 0.00218
        assert!(RateCheck::new("x", 560, 10_000, 0.05).pass());
        assert!(!RateCheck::new("x", 570, 10_000, 0.05).pass());
        assert!(BoundCheck::new("x", 90, 1000, 0.1).pass());
        assert!(!BoundCheck::new("x", 140, 1000, 0.1).pass());
    }

    #[test]
    fn line_marks_outcome() {
        assert!(RateCheck::new("v", 1, 2, 0.5).line().ends_with("[ok]"));
        assert!(RateCheck::new("v", 0, 2, 1.0).line().ends_with("[FAIL]"));
    }
}
