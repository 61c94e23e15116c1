use crate::{Error, Result, Scalar};

/// Default `w4` in the step cap `sqrt(1 - w4) / (sqrt(2) L)`.
pub const DEFAULT_W4: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// `min(ᾱ/√T, cap)` at every iteration
    ConstantHorizon,
    /// `min(ᾱ/√(k+1), cap)`
    Diminishing,
    /// `ᾱ/√(k+1)`, never capped
    ParameterFree,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSchedule<T> {
    pub kind: StepKind,
    pub alpha_bar: T,
    pub cap: Option<T>,
}

impl<T: Scalar> StepSchedule<T> {
    pub fn new(kind: StepKind, alpha_bar: T, cap: Option<T>) -> Result<Self> {
        let s = Self {
            kind,
            alpha_bar,
            cap,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn constant_horizon(alpha_bar: T, cap: Option<T>) -> Result<Self> {
        Self::new(StepKind::ConstantHorizon, alpha_bar, cap)
    }

    pub fn diminishing(alpha_bar: T, cap: Option<T>) -> Result<Self> {
        Self::new(StepKind::Diminishing, alpha_bar, cap)
    }

    pub fn parameter_free(alpha_bar: T) -> Result<Self> {
        Self::new(StepKind::ParameterFree, alpha_bar, None)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_bar > T::zero()) || !self.alpha_bar.is_finite() {
            return Err(Error::Config(format!(
                "alpha_bar must be > 0, got {}",
                self.alpha_bar
            )));
        }
        if let Some(c) = self.cap {
            if !(c > T::zero()) {
                return Err(Error::Config(format!("step cap must be > 0, got {c}")));
            }
        }
        Ok(())
    }

    /// The cap in force, if any. Parameter-free schedules ignore it.
    pub fn active_cap(&self) -> Option<T> {
        match self.kind {
            StepKind::ParameterFree => None,
            _ => self.cap,
        }
    }

    /// `α_k` for `1 <= k <= horizon`.
    pub fn at(&self, k: usize, horizon: usize) -> T {
        let raw = match self.kind {
            StepKind::ConstantHorizon => self.alpha_bar / T::of(horizon as f64).sqrt(),
            StepKind::Diminishing | StepKind::ParameterFree => {
                self.alpha_bar / T::of((k + 1) as f64).sqrt()
            }
        };
        match self.active_cap() {
            Some(c) => raw.min(c),
            None => raw,
        }
    }
}

pub fn step_size_at<T: Scalar>(s: &StepSchedule<T>, k: usize, horizon: usize) -> T {
    s.at(k, horizon)
}

/// `sqrt(1 - w4) / (sqrt(2) L)`; `None` when `L = 0` (no cap needed).
pub fn step_cap<T: Scalar>(w4: T, lipschitz: T) -> Result<Option<T>> {
    if !(w4 > T::zero() && w4 < T::one()) {
        return Err(Error::Config(format!("w4 must lie in (0, 1), got {w4}")));
    }
    if !(lipschitz >= T::zero()) {
        return Err(Error::Config(format!(
            "Lipschitz constant must be >= 0, got {lipschitz}"
        )));
    }
    if lipschitz.is_zero() {
        return Ok(None);
    }
    Ok(Some(
        (T::one() - w4).sqrt() / (T::of(2.0).sqrt() * lipschitz),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_examples() {
        let pf = StepSchedule::parameter_free(1.0).unwrap();
        assert_eq!(pf.at(3, 10), 0.5);
        let ch = StepSchedule::constant_horizon(1.0, None).unwrap();
        for k in 1..=100 {
            assert_eq!(ch.at(k, 100), 0.1);
        }
        let dim = StepSchedule::diminishing(1.0, Some(0.2)).unwrap();
        assert_eq!(dim.at(3, 10), 0.2);
        assert_eq!(dim.at(99, 100), 0.1);
    }

    #[test]
    fn parameter_free_ignores_cap() {
        let s = StepSchedule::new(StepKind::ParameterFree, 1.0, Some(0.01)).unwrap();
        assert_eq!(s.at(3, 10), 0.5);
    }

    #[test]
    fn diminishing_is_nonincreasing() {
        let s = StepSchedule::diminishing(0.3, Some(0.1)).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..1000 {
            let a = s.at(k, 1000);
            assert!(a > 0.0 && a <= last && a <= 0.1);
            last = a;
        }
    }

    #[test]
    fn cap_formula() {
        let c = step_cap(0.1, 4.0).unwrap().unwrap();
        assert!((c - 0.9f64.sqrt() / (2f64.sqrt() * 4.0)).abs() < 1e-15);
        assert_eq!(step_cap(0.1, 0.0).unwrap(), None);
        assert!(step_cap(1.0, 1.0).is_err());
        assert!(StepSchedule::diminishing(0.0, None).is_err());
    }
}
