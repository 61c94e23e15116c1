use crate::numkit::{RealVec, SeededStream};
use crate::problem::{ConstraintFamily, ProblemSpec};
use crate::{Error, Result, Scalar};

/// Candidate count used when nothing else is configured.
pub const DEFAULT_CLOUD_CANDIDATES: usize = 1500;

/// Points of `S` found by uniform rejection sampling over the base box.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasiblePointCloud<T> {
    pub points: Vec<RealVec<T>>,
    pub num_candidates: usize,
    pub seed: u64,
    pub stream: u64,
}

impl<T> FeasiblePointCloud<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn sample_feasible_points<T: Scalar>(
    spec: &ProblemSpec<T>,
    n_candidates: usize,
    rng: &mut SeededStream,
) -> Result<FeasiblePointCloud<T>> {
    if n_candidates == 0 {
        return Err(Error::InvalidInput("need at least one candidate".into()));
    }
    let (seed, stream) = (rng.master_seed(), rng.stream_id());
    let mut points = Vec::new();
    for _ in 0..n_candidates {
        let x = spec.base_set().sample_uniform(rng);
        if spec.family().is_feasible(&x)? {
            points.push(x);
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud {
            candidates: n_candidates,
        });
    }
    Ok(FeasiblePointCloud {
        points,
        num_candidates: n_candidates,
        seed,
        stream,
    })
}

/// Largest cloud the product construction will materialize.
pub const MAX_PRODUCT_CLOUD: usize = 20_000_000;

/// Cloud for problems whose constraints each read one coordinate block.
/// Every block gets `n_candidates` uniform draws over the base box, filtered
/// by the members acting on that block, and the cloud is the Cartesian
/// product of the per-block survivors.
pub fn sample_product_feasible_points<T: Scalar>(
    spec: &ProblemSpec<T>,
    n_candidates: usize,
    rng: &mut SeededStream,
) -> Result<FeasiblePointCloud<T>> {
    if n_candidates == 0 {
        return Err(Error::InvalidInput("need at least one candidate".into()));
    }
    let members = spec
        .family()
        .members()
        .ok_or_else(|| Error::Unsupported("cloud over a generative family".into()))?;
    let blocks = spec.blocks();
    if !members.iter().all(|m| blocks.contains(&m.block())) {
        return Err(Error::Unsupported(
            "product cloud needs every constraint to read a single block".into(),
        ));
    }
    let (seed, stream) = (rng.master_seed(), rng.stream_id());
    let mut per_block: Vec<Vec<Vec<T>>> = Vec::with_capacity(blocks.len());
    for block in blocks {
        let on_block: Vec<_> = members.iter().filter(|m| m.block() == *block).collect();
        let mut kept = Vec::new();
        for _ in 0..n_candidates {
            let x = spec.base_set().sample_uniform(rng);
            let mut ok = true;
            for m in &on_block {
                if m.value(&x)? > T::zero() {
                    ok = false;
                    break;
                }
            }
            if ok {
                kept.push(x.as_slice()[block.clone()].to_vec());
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyCloud {
                candidates: n_candidates,
            });
        }
        per_block.push(kept);
    }
    let total = per_block
        .iter()
        .try_fold(1usize, |acc, b| acc.checked_mul(b.len()))
        .filter(|&t| t <= MAX_PRODUCT_CLOUD)
        .ok_or_else(|| Error::InvalidInput("product cloud too large".into()))?;
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; blocks.len()];
    for _ in 0..total {
        let mut x = vec![T::zero(); spec.dim()];
        for (b, block) in blocks.iter().enumerate() {
            x[block.clone()].copy_from_slice(&per_block[b][idx[b]]);
        }
        points.push(RealVec::from_vec_unchecked(x));
        // odometer, last block fastest
        for b in (0..blocks.len()).rev() {
            idx[b] += 1;
            if idx[b] < per_block[b].len() {
                break;
            }
            idx[b] = 0;
        }
    }
    Ok(FeasiblePointCloud {
        points,
        num_candidates: n_candidates,
        seed,
        stream,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapEstimate<T> {
    pub value: T,
    pub num_samples: usize,
    pub num_feasible: usize,
}

/// `max_{x ∈ cloud} ⟨F(x), y − x⟩` with the mean map `F`.
pub fn dual_gap_signed<T: Scalar>(
    y: &RealVec<T>,
    cloud: &FeasiblePointCloud<T>,
    spec: &ProblemSpec<T>,
) -> Result<T> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud {
            candidates: cloud.num_candidates,
        });
    }
    Error::check_dim(spec.dim(), y.dim())?;
    let mut best = T::neg_infinity();
    for x in &cloud.points {
        let fx = spec.map_mean(x)?;
        best = best.max(fx.dot(&y.sub(x)));
    }
    Ok(best)
}

/// `|max_{x ∈ cloud} ⟨F(x), y − x⟩|`
pub fn estimate_modified_dual_gap<T: Scalar>(
    y: &RealVec<T>,
    cloud: &FeasiblePointCloud<T>,
    spec: &ProblemSpec<T>,
) -> Result<GapEstimate<T>> {
    let signed = dual_gap_signed(y, cloud, spec)?;
    Ok(GapEstimate {
        value: signed.abs(),
        num_samples: cloud.num_candidates,
        num_feasible: cloud.len(),
    })
}

/// Gap estimator with `F(x)` and `⟨F(x), x⟩` precomputed for every cloud
/// point, for repeated evaluation against one cloud.
#[derive(Clone, Debug)]
pub struct GapEvaluator<T> {
    maps: Vec<RealVec<T>>,
    offsets: Vec<T>,
    num_samples: usize,
}

impl<T: Scalar> GapEvaluator<T> {
    pub fn new(cloud: &FeasiblePointCloud<T>, spec: &ProblemSpec<T>) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud {
                candidates: cloud.num_candidates,
            });
        }
        let mut maps = Vec::with_capacity(cloud.len());
        let mut offsets = Vec::with_capacity(cloud.len());
        for x in &cloud.points {
            let fx = spec.map_mean(x)?;
            offsets.push(fx.dot(x));
            maps.push(fx);
        }
        Ok(Self {
            maps,
            offsets,
            num_samples: cloud.num_candidates,
        })
    }

    pub fn signed(&self, y: &RealVec<T>) -> T {
        self.maps
            .iter()
            .zip(&self.offsets)
            .map(|(fx, &off)| fx.dot(y) - off)
            .fold(T::neg_infinity(), T::max)
    }

    pub fn estimate(&self, y: &RealVec<T>) -> GapEstimate<T> {
        GapEstimate {
            value: self.signed(y).abs(),
            num_samples: self.num_samples,
            num_feasible: self.maps.len(),
        }
    }
}

/// `Σ_a max(g_a(x), 0)` over a finite family.
pub fn infeasibility_surrogate<T: Scalar>(
    x: &RealVec<T>,
    family: &ConstraintFamily<T>,
) -> Result<T> {
    let members = family
        .members()
        .ok_or_else(|| Error::Unsupported("surrogate over a generative family".into()))?;
    let mut total = T::zero();
    for m in members {
        total = total + m.value(x)?.max(T::zero());
    }
    Ok(total)
}

/// `|max_{x ∈ cloud} ⟨F(x), x̂ − x̃⟩|`, where `x̃` is the same weighted
/// average taken over the projections `Π_S[x_t]`. Only meaningful on
/// problems with an exact projection.
pub fn infeasibility_term<T: Scalar>(
    xhat: &RealVec<T>,
    xtilde: &RealVec<T>,
    cloud: &FeasiblePointCloud<T>,
    spec: &ProblemSpec<T>,
) -> Result<T> {
    let delta = xhat.sub(xtilde);
    let mut best = T::neg_infinity();
    for x in &cloud.points {
        best = best.max(spec.map_mean(x)?.dot(&delta));
    }
    Ok(best.abs())
}
