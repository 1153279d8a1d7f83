//! Dual-layer system model `y = H̄·W·s + n` and per-tone noise whitening.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::numerics::{self, cholesky_factor, hermitian_inverse, ComplexMatrix};
use crate::priors::Layer;
use crate::{Error, Real, Result};

/// One channel use: physical channel, precoder, effective channel and noise
/// statistics. `inv_covariance` is `Q = C_nn⁻¹`.
#[derive(Clone, Debug)]
pub struct ChannelRealization<T> {
    hbar: ComplexMatrix<T>,
    precoder: ComplexMatrix<T>,
    effective: ComplexMatrix<T>,
    inv_covariance: ComplexMatrix<T>,
    // Gᴴ where G·Gᴴ = Q
    whitener: ComplexMatrix<T>,
}

impl<T: Real> ChannelRealization<T> {
    /// Builds a realization from the noise covariance `C_nn`.
    pub fn new(
        hbar: ComplexMatrix<T>,
        precoder: ComplexMatrix<T>,
        noise_covariance: &ComplexMatrix<T>,
    ) -> Result<Self> {
        let q = hermitian_inverse(noise_covariance)?;
        Self::with_inverse_covariance(hbar, precoder, q)
    }

    /// Builds a realization from `Q = C_nn⁻¹` directly.
    pub fn with_inverse_covariance(
        hbar: ComplexMatrix<T>,
        precoder: ComplexMatrix<T>,
        inv_covariance: ComplexMatrix<T>,
    ) -> Result<Self> {
        if precoder.cols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: "precoder with 2 columns".into(),
                actual: format!("{} columns", precoder.cols()),
            });
        }
        let effective = hbar.matmul(&precoder)?;
        if inv_covariance.rows() != hbar.rows() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} inverse covariance", hbar.rows()),
                actual: format!("{}x{}", inv_covariance.rows(), inv_covariance.cols()),
            });
        }
        let whitener = cholesky_factor(&inv_covariance)?.conj_transpose();
        Ok(Self {
            hbar,
            precoder,
            effective,
            inv_covariance,
            whitener,
        })
    }

    pub fn receive_antennas(&self) -> usize {
        self.hbar.rows()
    }

    pub fn transmit_antennas(&self) -> usize {
        self.hbar.cols()
    }

    pub fn physical(&self) -> &ComplexMatrix<T> {
        &self.hbar
    }

    pub fn precoder(&self) -> &ComplexMatrix<T> {
        &self.precoder
    }

    /// `H = H̄·W`, `N_r × 2`.
    pub fn effective(&self) -> &ComplexMatrix<T> {
        &self.effective
    }

    /// Effective column `h_i` for `layer`.
    pub fn column(&self, layer: Layer) -> Vec<Complex<T>> {
        self.effective.column(layer.index())
    }

    pub fn inv_covariance(&self) -> &ComplexMatrix<T> {
        &self.inv_covariance
    }

    /// `Gᴴ`, the matrix applied to received vectors and channel columns.
    pub fn whitener(&self) -> &ComplexMatrix<T> {
        &self.whitener
    }
}

/// Whitened received vector and channel columns for one tone.
#[derive(Clone, Debug, PartialEq)]
pub struct WhitenedObservation<T> {
    y: Vec<Complex<T>>,
    h1: Vec<Complex<T>>,
    h2: Vec<Complex<T>>,
    g1: T,
    g2: T,
}

impl<T: Real> WhitenedObservation<T> {
    /// Wraps already-whitened quantities, caching `‖h̃₁‖²` and `‖h̃₂‖²`.
    pub fn new(y: Vec<Complex<T>>, h1: Vec<Complex<T>>, h2: Vec<Complex<T>>) -> Result<Self> {
        if h1.len() != y.len() || h2.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("channel columns of length {}", y.len()),
                actual: format!("{} and {}", h1.len(), h2.len()),
            });
        }
        let finite = |v: &[Complex<T>]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&y) || !finite(&h1) || !finite(&h2) {
            return Err(Error::NonFinite("whitened observation".into()));
        }
        let g1 = numerics::norm_sqr(&h1);
        let g2 = numerics::norm_sqr(&h2);
        let floor = T::lit(1e-14);
        for (layer, gain) in [(1, g1), (2, g2)] {
            if !(gain >= floor) {
                return Err(Error::DegenerateChannel {
                    layer,
                    gain: gain.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { y, h1, h2, g1, g2 })
    }

    pub fn y(&self) -> &[Complex<T>] {
        &self.y
    }

    pub fn h1(&self) -> &[Complex<T>] {
        &self.h1
    }

    pub fn h2(&self) -> &[Complex<T>] {
        &self.h2
    }

    pub fn g1(&self) -> T {
        self.g1
    }

    pub fn g2(&self) -> T {
        self.g2
    }

    pub fn column(&self, layer: Layer) -> &[Complex<T>] {
        match layer {
            Layer::First => &self.h1,
            Layer::Second => &self.h2,
        }
    }

    /// `‖h̃_i‖²` for `layer`.
    pub fn gain(&self, layer: Layer) -> T {
        match layer {
            Layer::First => self.g1,
            Layer::Second => self.g2,
        }
    }

    pub fn receive_antennas(&self) -> usize {
        self.y.len()
    }

    /// `‖ỹ − h̃₁s₁ − h̃₂s₂‖²`.
    #[inline]
    pub fn residual_norm(&self, s1: Complex<T>, s2: Complex<T>) -> T {
        self.y
            .iter()
            .zip(&self.h1)
            .zip(&self.h2)
            .fold(T::zero(), |acc, ((y, a), b)| {
                acc + (y - a * s1 - b * s2).norm_sqr()
            })
    }
}

/// Whitens `y` and the effective channel columns with `Gᴴ`.
pub fn whiten<T: Real>(
    y: &[Complex<T>],
    channel: &ChannelRealization<T>,
) -> Result<WhitenedObservation<T>> {
    let w = channel.whitener();
    let y_t = w.mul_vec(y)?;
    let h1 = w.mul_vec(&channel.column(Layer::First))?;
    let h2 = w.mul_vec(&channel.column(Layer::Second))?;
    WhitenedObservation::new(y_t, h1, h2)
}

/// `y = h₁s₁ + h₂s₂ + n`.
pub fn transmit<T: Real>(
    symbols: [Complex<T>; 2],
    channel: &ChannelRealization<T>,
    noise: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let h = channel.effective();
    if noise.len() != h.rows() {
        return Err(Error::DimensionMismatch {
            expected: format!("noise of length {}", h.rows()),
            actual: format!("length {}", noise.len()),
        });
    }
    let mut y = h.mul_vec(&symbols)?;
    for (yi, ni) in y.iter_mut().zip(noise) {
        *yi = *yi + ni;
    }
    Ok(y)
}

/// Precoder selecting the first two transmit antennas.
pub fn default_precoder<T: Real>(transmit_antennas: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(transmit_antennas, 2, |i, j| {
        if i == j {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::zero()
        }
    })
}

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T>
where
    StandardNormal: Distribution<T>,
{
    let scale = T::FRAC_1_SQRT_2();
    let re: T = StandardNormal.sample(rng);
    let im: T = StandardNormal.sample(rng);
    Complex::new(re * scale, im * scale)
}

/// I.i.d. CN(0, 1) channel matrix of size `rows × cols`.
pub fn generate_channel<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> ComplexMatrix<T>
where
    StandardNormal: Distribution<T>,
{
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Draws zero-mean circularly-symmetric Gaussian noise with covariance `C_nn`.
#[derive(Clone, Debug)]
pub struct NoiseGenerator<T> {
    factor: ComplexMatrix<T>,
}

impl<T: Real> NoiseGenerator<T> {
    pub fn new(covariance: &ComplexMatrix<T>) -> Result<Self> {
        Ok(Self {
            factor: cholesky_factor(covariance)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.factor.rows()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex<T>>
    where
        StandardNormal: Distribution<T>,
    {
        let w: Vec<Complex<T>> = (0..self.dim()).map(|_| complex_gaussian(rng)).collect();
        self.factor.mul_vec(&w).expect("square factor")
    }
}

/// One noise vector with covariance `covariance`.
pub fn generate_noise<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    covariance: &ComplexMatrix<T>,
) -> Result<Vec<Complex<T>>>
where
    StandardNormal: Distribution<T>,
{
    Ok(NoiseGenerator::new(covariance)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::build_constellation;
    use crate::numerics::quadratic_norm;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix<f64> {
        let a = generate_channel::<f64, _>(rng, n, n);
        let mut q = a.matmul(&a.conj_transpose()).unwrap();
        for i in 0..n {
            q[(i, i)] += c(0.2, 0.0);
        }
        q
    }

    #[test]
    fn identity_whitener_is_transparent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hbar = generate_channel::<f64, _>(&mut rng, 3, 2);
        let ch = ChannelRealization::with_inverse_covariance(
            hbar,
            default_precoder(2),
            ComplexMatrix::identity(3),
        )
        .unwrap();
        let y = vec![c(1.0, -1.0), c(0.5, 0.25), c(-2.0, 0.0)];
        let obs = whiten(&y, &ch).unwrap();
        assert_eq!(obs.y(), &y[..]);
        assert_eq!(obs.h1(), &ch.column(Layer::First)[..]);
        assert_eq!(obs.h2(), &ch.column(Layer::Second)[..]);
    }

    #[test]
    fn diagonal_whitener_scales_gain() {
        let hbar = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let ch = ChannelRealization::with_inverse_covariance(
            hbar,
            default_precoder(2),
            ComplexMatrix::diagonal(&[4.0, 1.0]),
        )
        .unwrap();
        let obs = whiten(&[c(0.0, 0.0), c(0.0, 0.0)], &ch).unwrap();
        assert!((obs.g2() - 4.0).abs() < 1e-15);
        assert!((obs.g1() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn effective_channel_is_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hbar = generate_channel::<f64, _>(&mut rng, 4, 3);
        let w = generate_channel::<f64, _>(&mut rng, 3, 2);
        let ch =
            ChannelRealization::new(hbar.clone(), w.clone(), &ComplexMatrix::identity(4)).unwrap();
        assert!(ch.effective().max_abs_diff(&hbar.matmul(&w).unwrap()) <= 1e-12);
    }

    #[test]
    fn whitening_preserves_q_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let qam = build_constellation::<f64>(16).unwrap();
        for _ in 0..200 {
            let nr = rng.gen_range(2..=6);
            let q = random_hpd(&mut rng, nr);
            let ch = ChannelRealization::with_inverse_covariance(
                generate_channel(&mut rng, nr, 2),
                default_precoder(2),
                q.clone(),
            )
            .unwrap();
            let y: Vec<_> = (0..nr)
                .map(|_| complex_gaussian::<f64, _>(&mut rng))
                .collect();
            let obs = whiten(&y, &ch).unwrap();
            let s = [
                qam.symbol(rng.gen_range(0..16)),
                qam.symbol(rng.gen_range(0..16)),
            ];
            let hs = ch.effective().mul_vec(&s).unwrap();
            let r: Vec<_> = y.iter().zip(&hs).map(|(a, b)| a - b).collect();
            let direct = quadratic_norm(&r, &q).unwrap();
            let white = obs.residual_norm(s[0], s[1]);
            assert!((direct - white).abs() <= 1e-10 * direct.max(1.0));
        }
    }

    #[test]
    fn noiseless_residual_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let qam = build_constellation::<f64>(64).unwrap();
        let cov = random_hpd(&mut rng, 3);
        let ch =
            ChannelRealization::new(generate_channel(&mut rng, 3, 2), default_precoder(2), &cov)
                .unwrap();
        let s = [qam.symbol(5), qam.symbol(40)];
        let y = transmit(s, &ch, &[Complex64::zero(); 3]).unwrap();
        let obs = whiten(&y, &ch).unwrap();
        assert!(obs.residual_norm(s[0], s[1]).sqrt() <= 1e-12);
    }

    #[test]
    fn transmit_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = ChannelRealization::new(
            generate_channel(&mut rng, 2, 2),
            default_precoder(2),
            &ComplexMatrix::identity(2),
        )
        .unwrap();
        let zero = [Complex64::zero(); 2];
        assert_eq!(
            transmit(zero, &ch, &zero).unwrap(),
            vec![Complex64::zero(); 2]
        );
        let s = [c(0.3, -0.1), c(-0.7, 0.7)];
        assert_eq!(
            transmit(s, &ch, &zero).unwrap(),
            ch.effective().mul_vec(&s).unwrap()
        );
        let n1 = [c(0.1, 0.2), c(-0.3, 0.4)];
        let n2 = [c(1.0, -1.0), c(0.5, 0.5)];
        let n12: Vec<_> = n1.iter().zip(&n2).map(|(a, b)| a + b).collect();
        let lhs = transmit(s, &ch, &n12).unwrap();
        let rhs = transmit(s, &ch, &n1).unwrap();
        for i in 0..2 {
            assert!((lhs[i] - (rhs[i] + n2[i])).norm() < 1e-15);
        }
        assert!(transmit(s, &ch, &n1[..1]).is_err());
    }

    #[test]
    fn degenerate_column_rejected() {
        let y = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let err = WhitenedObservation::new(
            y,
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![Complex64::zero(); 2],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateChannel { layer: 2, .. }));
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let a = generate_channel::<f64, _>(&mut ChaCha8Rng::seed_from_u64(9), 2, 4);
        let b = generate_channel::<f64, _>(&mut ChaCha8Rng::seed_from_u64(9), 2, 4);
        assert_eq!(a, b);
        let cov = ComplexMatrix::diagonal(&[1.0, 2.0]);
        let n1 = generate_noise(&mut ChaCha8Rng::seed_from_u64(9), &cov).unwrap();
        let n2 = generate_noise(&mut ChaCha8Rng::seed_from_u64(9), &cov).unwrap();
        assert_eq!(n1, n2);
    }

    #[test]
    fn zero_covariance_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            generate_noise::<f64, _>(&mut rng, &ComplexMatrix::zeros(2, 2)),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn noise_sample_covariance_matches() {
        let cov = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.5, 0.2)],
            vec![c(0.5, -0.2), c(2.0, 0.0)],
        ])
        .unwrap();
        let gen = NoiseGenerator::new(&cov).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 100_000;
        let mut acc = ComplexMatrix::<f64>::zeros(2, 2);
        for _ in 0..draws {
            let n = gen.sample(&mut rng);
            for i in 0..2 {
                for j in 0..2 {
                    acc[(i, j)] += n[i] * n[j].conj();
                }
            }
        }
        let est = acc.scale(1.0 / draws as f64);
        for i in 0..2 {
            for j in 0..2 {
                let rel = (est[(i, j)] - cov[(i, j)]).norm() / cov[(i, j)].norm();
                assert!(rel < 0.05, "({i},{j}) rel err {rel}");
            }
        }
    }
}
