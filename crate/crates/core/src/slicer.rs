//! Prior-shifted decision regions on one PAM axis.
//!
//! For a statistic `z`, the best PAM point maximizes
//! `logp[k]/gain − (z − x_k)²`. Dropping the common `−z²` leaves one line per
//! point with slope `2x_k`, so each point wins on a single interval (possibly
//! empty) and the winners, walked from the largest amplitude down, form the
//! upper envelope of those lines. [`build_regions`] walks that envelope once
//! per tone; [`slice`] is then a threshold lookup.
//!
//! Intervals are half-open `[lower, upper)`: a statistic sitting exactly on a
//! boundary goes to the higher-amplitude point, which is also what the
//! lowest-index-wins tie rule of [`argmax_slice_oracle`] picks.

use crate::constellation::PamAxis;
use crate::priors::AxisLogPriors;
use crate::{Error, Real, Result};

/// Interval `[lower, upper)` owned by one PAM point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> Interval<T> {
    pub fn contains(&self, z: T) -> bool {
        z >= self.lower && z < self.upper
    }
}

/// Decision regions of every point of one PAM axis.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionRegions<T> {
    points: Vec<T>,
    intervals: Vec<Option<Interval<T>>>,
    survivors: Vec<usize>,
    gain: T,
    boundary_count: usize,
}

impl<T: Real> DecisionRegions<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Region of point `k`, `None` when it was pruned.
    pub fn interval(&self, k: usize) -> Option<Interval<T>> {
        self.intervals[k]
    }

    pub fn lower(&self, k: usize) -> Option<T> {
        self.intervals[k].map(|i| i.lower)
    }

    pub fn upper(&self, k: usize) -> Option<T> {
        self.intervals[k].map(|i| i.upper)
    }

    /// Whether point `k` can never be the slicer output.
    pub fn is_pruned(&self, k: usize) -> bool {
        self.intervals[k].is_none()
    }

    /// Indices of points that own a region, in descending amplitude.
    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }

    pub fn gain(&self) -> T {
        self.gain
    }

    /// Number of distinct `D_kj` evaluations performed while building.
    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }
}

#[inline]
fn boundary_unchecked<T: Real>(points: &[T], logp: &[T], k: usize, j: usize, gain: T) -> T {
    // canonical order so D_kj and D_jk are the same floating-point value
    let (a, b) = if k < j { (k, j) } else { (j, k) };
    let (xa, xb) = (points[a], points[b]);
    let two = T::lit(2.0);
    (xa + xb) / two - (logp[a] - logp[b]) / (two * (xa - xb) * gain)
}

fn check_gain<T: Real>(gain: T) -> Result<()> {
    if gain > T::zero() && gain.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "slicer gain {gain} must be positive and finite"
        )))
    }
}

/// Probabilistic boundary `D_kj` between PAM points `k` and `j`: the value of
/// `z` at which both points score equally. Symmetric in `(k, j)`.
pub fn pairwise_boundary<T: Real>(
    pam: &PamAxis<T>,
    k: usize,
    j: usize,
    logp: &AxisLogPriors<T>,
    gain: T,
) -> Result<T> {
    check_gain(gain)?;
    let len = pam.len();
    if k == j {
        return Err(Error::InvalidArgument(format!(
            "boundary needs two distinct points, got {k} twice"
        )));
    }
    for idx in [k, j] {
        if idx >= len {
            return Err(Error::IndexOutOfRange { index: idx, len });
        }
    }
    check_logp(pam, logp)?;
    Ok(boundary_unchecked(pam.points(), &logp.logp, k, j, gain))
}

fn check_logp<T: Real>(pam: &PamAxis<T>, logp: &AxisLogPriors<T>) -> Result<()> {
    if logp.len() != pam.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} log-priors", pam.len()),
            actual: format!("{}", logp.len()),
        });
    }
    if logp.logp.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("axis log-prior".into()));
    }
    Ok(())
}

/// Builds the decision regions of one axis.
///
/// Walks `k` from the largest amplitude down. The lower threshold of `k` is
/// `max_{j>k} D_kj`, attained at `j*`; every point strictly between `k` and
/// `j*` has an empty region and is skipped, and the walk resumes at `j*`.
/// The upper threshold is `min_{j<k} D_kj` over all earlier points, pruned or
/// not. Each unordered pair is evaluated at most once.
pub fn build_regions<T: Real>(
    pam: &PamAxis<T>,
    logp: &AxisLogPriors<T>,
    gain: T,
) -> Result<DecisionRegions<T>> {
    check_gain(gain)?;
    check_logp(pam, logp)?;
    let len = pam.len();
    if len < 2 {
        return Err(Error::InvalidArgument(format!(
            "PAM axis needs at least 2 points, has {len}"
        )));
    }
    let points = pam.points();
    let mut cache: Vec<Option<T>> = vec![None; len * len];
    let mut count = 0usize;
    let mut boundary = |k: usize, j: usize| -> T {
        let slot = k.min(j) * len + k.max(j);
        *cache[slot].get_or_insert_with(|| {
            count += 1;
            boundary_unchecked(points, &logp.logp, k, j, gain)
        })
    };

    let mut intervals = vec![None; len];
    let mut survivors = Vec::new();
    let mut k = 0;
    while k < len {
        let (lower, next) = if k + 1 == len {
            (T::neg_infinity(), len)
        } else {
            let mut best = boundary(k, k + 1);
            let mut arg = k + 1;
            for j in k + 2..len {
                let d = boundary(k, j);
                // ties go to the farther point; the ones in between are degenerate
                if d >= best {
                    best = d;
                    arg = j;
                }
            }
            (best, arg)
        };
        let upper = (0..k).fold(T::infinity(), |m, j| m.min(boundary(k, j)));
        intervals[k] = Some(Interval { lower, upper });
        survivors.push(k);
        k = next;
    }

    Ok(DecisionRegions {
        points: points.to_vec(),
        intervals,
        survivors,
        gain,
        boundary_count: count,
    })
}

/// Index of the PAM point whose region contains `z`.
#[inline]
pub fn slice<T: Real>(regions: &DecisionRegions<T>, z: T) -> usize {
    let survivors = &regions.survivors;
    let last = survivors.len() - 1;
    for &k in &survivors[..last] {
        if let Some(iv) = regions.intervals[k] {
            if z >= iv.lower {
                return k;
            }
        }
    }
    survivors[last]
}

/// Exhaustive reference for [`slice`]: scores every point and returns the
/// first maximizer of `logp[k]/gain − (z − x_k)²`.
pub fn argmax_slice_oracle<T: Real>(
    pam: &PamAxis<T>,
    logp: &AxisLogPriors<T>,
    gain: T,
    z: T,
) -> usize {
    let mut best = T::neg_infinity();
    let mut arg = 0;
    for (k, (&x, &p)) in pam.points().iter().zip(&logp.logp).enumerate() {
        let score = p / gain - (z - x) * (z - x);
        if score > best {
            best = score;
            arg = k;
        }
    }
    arg
}
