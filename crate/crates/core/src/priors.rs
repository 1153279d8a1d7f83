//! A-priori code-bit LLRs and their per-axis log-prior form.
//!
//! LLRs follow `L_a = log P(c=1)/P(c=0)`. A symbol's unnormalized log-prior is
//! `Σ_n b_n·L_a(c_n)` over its label bits, which differs from the true
//! log-probability only by a per-layer constant.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constellation::PamAxis;
use crate::{Error, Real, Result};

/// Clamp bound applied to a-priori LLRs unless stated otherwise.
pub const DEFAULT_LLR_CLAMP: f64 = 50.0;

/// One of the two transmitted streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layer {
    First,
    Second,
}

impl Layer {
    pub const BOTH: [Layer; 2] = [Layer::First, Layer::Second];

    /// 0 for the first layer, 1 for the second.
    pub fn index(self) -> usize {
        match self {
            Layer::First => 0,
            Layer::Second => 1,
        }
    }

    /// 1-based layer number.
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn other(self) -> Layer {
        match self {
            Layer::First => Layer::Second,
            Layer::Second => Layer::First,
        }
    }
}

/// In-phase or quadrature PAM axis of a QAM symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Real,
    Imag,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::Real, Axis::Imag];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Real => "real",
            Axis::Imag => "imag",
        }
    }
}

/// `2 × q` a-priori LLRs, finite and clamped.
#[derive(Clone, Debug, PartialEq)]
pub struct AprioriLlrs<T> {
    values: [Vec<T>; 2],
    bound: T,
}

impl<T: Real> AprioriLlrs<T> {
    /// Uninformative priors for `bits` bits per symbol.
    pub fn zeros(bits: usize) -> Self {
        Self {
            values: [vec![T::zero(); bits], vec![T::zero(); bits]],
            bound: T::lit(DEFAULT_LLR_CLAMP),
        }
    }

    /// Validates and clamps with [`DEFAULT_LLR_CLAMP`].
    pub fn new(first: Vec<T>, second: Vec<T>) -> Result<Self> {
        clamp([first, second], T::lit(DEFAULT_LLR_CLAMP))
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.values[0].len()
    }

    pub fn layer(&self, layer: Layer) -> &[T] {
        &self.values[layer.index()]
    }

    #[inline]
    pub fn get(&self, layer: Layer, bit: usize) -> T {
        self.values[layer.index()][bit]
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    /// The same priors with the layers exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            values: [self.values[1].clone(), self.values[0].clone()],
            bound: self.bound,
        }
    }
}

/// Clamps every entry to `[-bound, bound]`. NaN entries are rejected.
pub fn clamp<T: Real>(values: [Vec<T>; 2], bound: T) -> Result<AprioriLlrs<T>> {
    if !(bound > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "LLR clamp bound {bound} must be positive"
        )));
    }
    if values[0].len() != values[1].len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} LLRs per layer", values[0].len()),
            actual: format!("{}", values[1].len()),
        });
    }
    let [mut first, mut second] = values;
    for (layer, row) in [&mut first, &mut second].into_iter().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            if v.is_nan() {
                return Err(Error::NonFinite(format!(
                    "a-priori LLR for layer {} bit {n} is NaN",
                    layer + 1
                )));
            }
            *v = v.max(-bound).min(bound);
        }
    }
    Ok(AprioriLlrs {
        values: [first, second],
        bound,
    })
}

/// Unnormalized log-priors of one PAM axis of one layer.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisLogPriors<T> {
    pub layer: Layer,
    pub axis: Axis,
    pub logp: Vec<T>,
}

impl<T: Real> AxisLogPriors<T> {
    /// Uniform priors over `len` points.
    pub fn uniform(layer: Layer, axis: Axis, len: usize) -> Self {
        Self {
            layer,
            axis,
            logp: vec![T::zero(); len],
        }
    }

    pub fn from_values(layer: Layer, axis: Axis, logp: Vec<T>) -> Self {
        Self { layer, axis, logp }
    }

    pub fn len(&self) -> usize {
        self.logp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logp.is_empty()
    }
}

/// `logp[k] = Σ_n b_{n,k}·L_a(c_n)` over the bits `axis` carries for `layer`.
pub fn axis_log_priors<T: Real>(
    llrs: &AprioriLlrs<T>,
    layer: Layer,
    axis: Axis,
    pam: &PamAxis<T>,
) -> AxisLogPriors<T> {
    let offset = match axis {
        Axis::Real => 0,
        Axis::Imag => pam.bits(),
    };
    let row = &llrs.layer(layer)[offset..offset + pam.bits()];
    let logp = (0..pam.len())
        .map(|k| {
            row.iter()
                .enumerate()
                .filter(|&(n, _)| pam.bit(k, n))
                .fold(T::zero(), |acc, (_, &l)| acc + l)
        })
        .collect();
    AxisLogPriors { layer, axis, logp }
}

/// Synthetic decoder feedback: `L = mu·(2c − 1) + w`, `w ~ N(0, 2·mu)`,
/// clamped to `±bound`. `mu = 0` yields all-zero LLRs.
pub fn genie_priors<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    true_bits: &[Vec<bool>; 2],
    mu: T,
    bound: T,
) -> Result<AprioriLlrs<T>>
where
    StandardNormal: Distribution<T>,
{
    if !(mu >= T::zero()) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "genie reliability mu={mu} must be finite and >= 0"
        )));
    }
    let sigma = (T::lit(2.0) * mu).sqrt();
    let draw = |rng: &mut R, bits: &[bool]| -> Vec<T> {
        bits.iter()
            .map(|&c| {
                if mu == T::zero() {
                    return T::zero();
                }
                let sign = if c { T::one() } else { -T::one() };
                let w: T = StandardNormal.sample(rng);
                mu * sign + sigma * w
            })
            .collect()
    };
    let first = draw(rng, &true_bits[0]);
    let second = draw(rng, &true_bits[1]);
    clamp([first, second], bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::build_constellation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_llrs_give_zero_logp() {
        let c = build_constellation::<f64>(64).unwrap();
        let llrs = AprioriLlrs::zeros(6);
        for layer in Layer::BOTH {
            for axis in Axis::BOTH {
                let p = axis_log_priors(&llrs, layer, axis, c.real_axis());
                assert_eq!(p.logp, vec![0.0; 8]);
            }
        }
    }

    #[test]
    fn single_bit_axis() {
        let c = build_constellation::<f64>(4).unwrap();
        let llrs = AprioriLlrs::new(vec![3.0, 0.0], vec![0.0, 0.0]).unwrap();
        let p = axis_log_priors(&llrs, Layer::First, Axis::Real, c.real_axis());
        // point 0 carries label 0, point 1 carries label 1
        assert_eq!(p.logp, vec![0.0, 3.0]);
        let q = axis_log_priors(&llrs, Layer::First, Axis::Imag, c.real_axis());
        assert_eq!(q.logp, vec![0.0, 0.0]);
    }

    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    #[test]
    fn logp_matches_bitwise_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for m in [4usize, 16, 64, 256] {
            let c = build_constellation::<f64>(m).unwrap();
            let q = c.bits_per_symbol();
            let pam = c.real_axis();
            for _ in 0..50 {
                let mut row = || {
                    (0..q)
                        .map(|_| rng.gen_range(-8.0..8.0))
                        .collect::<Vec<f64>>()
                };
                let (a, b) = (row(), row());
                let llrs = AprioriLlrs::new(a, b).unwrap();
                for layer in Layer::BOTH {
                    for axis in Axis::BOTH {
                        let p = axis_log_priors(&llrs, layer, axis, pam);
                        let max = p.logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        let z: f64 = p.logp.iter().map(|v| (v - max).exp()).sum();
                        let offset = if axis == Axis::Real { 0 } else { q / 2 };
                        for k in 0..pam.len() {
                            let oracle: f64 = (0..q / 2)
                                .map(|n| {
                                    let p1 = sigmoid(llrs.get(layer, offset + n));
                                    if pam.bit(k, n) {
                                        p1
                                    } else {
                                        1.0 - p1
                                    }
                                })
                                .product();
                            let got = (p.logp[k] - max).exp() / z;
                            assert!(
                                (got - oracle).abs() <= 1e-12,
                                "M={m} k={k}: {got} vs {oracle}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn clamp_behaviour() {
        let llrs = clamp(
            [vec![1.0, -2.0], vec![f64::INFINITY, f64::NEG_INFINITY]],
            50.0,
        )
        .unwrap();
        assert_eq!(llrs.layer(Layer::First), &[1.0, -2.0]);
        assert_eq!(llrs.layer(Layer::Second), &[50.0, -50.0]);
        assert!(matches!(
            clamp([vec![f64::NAN, 0.0], vec![0.0, 0.0]], 50.0),
            Err(Error::NonFinite(_))
        ));
        assert!(clamp([vec![0.0], vec![0.0, 1.0]], 50.0).is_err());
    }

    #[test]
    fn genie_zero_mu_is_uninformative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits = [vec![true, false, true, true], vec![false; 4]];
        let llrs = genie_priors(&mut rng, &bits, 0.0, 50.0).unwrap();
        assert_eq!(llrs, AprioriLlrs::zeros(4));
        assert!(genie_priors(&mut rng, &bits, -1.0, 50.0).is_err());
    }

    #[test]
    fn genie_is_seeded() {
        let bits = [
            vec![true, false, true, true],
            vec![false, true, false, false],
        ];
        let a = genie_priors(&mut ChaCha8Rng::seed_from_u64(5), &bits, 4.0, 50.0).unwrap();
        let b = genie_priors(&mut ChaCha8Rng::seed_from_u64(5), &bits, 4.0, 50.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn genie_high_mu_has_correct_sign() {
        use statrs::distribution::{ContinuousCDF, Normal};
        // P(sign error) = P(N(mu, 2mu) < 0) = Φ(−mu/√(2mu))
        let mu = 50.0f64;
        let p_err = Normal::new(0.0, 1.0).unwrap().cdf(-mu / (2.0 * mu).sqrt());
        assert!(p_err < 1e-6, "tail {p_err}");

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut wrong = 0;
        for t in 0..20_000 {
            let bits = [vec![t % 2 == 0; 4], vec![t % 3 == 0; 4]];
            let llrs = genie_priors(&mut rng, &bits, mu, 50.0).unwrap();
            for layer in Layer::BOTH {
                for (n, &c) in bits[layer.index()].iter().enumerate() {
                    let l = llrs.get(layer, n);
                    assert!(l.abs() <= 50.0);
                    if (l > 0.0) != c {
                        wrong += 1;
                    }
                }
            }
        }
        assert_eq!(wrong, 0);
    }

    #[test]
    fn genie_consistent_gaussian_moments() {
        let mu = 4.0f64;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits = [vec![true; 2], vec![false; 2]];
        let (mut sum, mut sum2, n) = (0.0, 0.0, 40_000);
        for _ in 0..n {
            let llrs = genie_priors(&mut rng, &bits, mu, 50.0).unwrap();
            let v = llrs.get(Layer::First, 0);
            sum += v;
            sum2 += v * v;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!((mean - mu).abs() < 0.05);
        assert!((var - 2.0 * mu).abs() < 0.2);
    }
}
