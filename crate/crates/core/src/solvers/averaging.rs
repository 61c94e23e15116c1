use crate::numkit::RealVec;
use crate::Scalar;

/// Weights `γ_k` for the ergodic average `Σ γ_k x_k / Σ γ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AveragingMode {
    /// `γ_k = α_k`
    Alpha,
    /// `γ_k = 1 / α_k`
    InvAlpha,
    /// `γ_k = 1`
    Uniform,
}

impl AveragingMode {
    pub const ALL: [AveragingMode; 3] = [Self::Alpha, Self::InvAlpha, Self::Uniform];

    pub fn weight<T: Scalar>(self, alpha: T) -> T {
        match self {
            Self::Alpha => alpha,
            Self::InvAlpha => alpha.recip(),
            Self::Uniform => T::one(),
        }
    }
}

/// `((s·avg + w·x) / (s + w), s + w)`
pub fn running_weighted_average<T: Scalar>(
    avg_prev: &RealVec<T>,
    wsum_prev: T,
    x_new: &RealVec<T>,
    w_new: T,
) -> (RealVec<T>, T) {
    debug_assert!(w_new > T::zero());
    let wsum = wsum_prev + w_new;
    // avg + (w/s)(x - avg) keeps the result inside the convex hull
    let avg = avg_prev.added_scaled(w_new / wsum, &x_new.sub(avg_prev));
    (avg, wsum)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunningAverage<T> {
    avg: RealVec<T>,
    wsum: T,
}

impl<T: Scalar> RunningAverage<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            avg: RealVec::zeros(dim),
            wsum: T::zero(),
        }
    }

    pub fn push(&mut self, x: &RealVec<T>, w: T) {
        let (avg, wsum) = running_weighted_average(&self.avg, self.wsum, x, w);
        self.avg = avg;
        self.wsum = wsum;
    }

    pub fn value(&self) -> &RealVec<T> {
        &self.avg
    }

    pub fn weight_sum(&self) -> T {
        self.wsum
    }
}

/// Snapshot of the three ergodic averages.
#[derive(Clone, Debug, PartialEq)]
pub struct Averages<T> {
    pub by_alpha: RealVec<T>,
    pub by_inv_alpha: RealVec<T>,
    pub uniform: RealVec<T>,
}

impl<T> Averages<T> {
    pub fn get(&self, mode: AveragingMode) -> &RealVec<T> {
        match mode {
            AveragingMode::Alpha => &self.by_alpha,
            AveragingMode::InvAlpha => &self.by_inv_alpha,
            AveragingMode::Uniform => &self.uniform,
        }
    }
}
