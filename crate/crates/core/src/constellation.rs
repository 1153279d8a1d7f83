//! Square M-QAM alphabets built as two identical Gray-labeled L-PAM axes.
//!
//! Symbol index `k` is the integer value of the symbol's `q`-bit label read
//! most-significant bit first. The first `q/2` bits select the in-phase PAM
//! point, the last `q/2` the quadrature point. PAM points are stored in
//! descending amplitude order and labeled with the binary-reflected Gray code
//! of their position, so neighbors on either axis differ in exactly one bit.

use num_complex::Complex;

use crate::{Error, Real, Result};

/// One real dimension of a square QAM constellation.
#[derive(Clone, Debug, PartialEq)]
pub struct PamAxis<T> {
    points: Vec<T>,
    spacing: T,
    labels: Vec<u32>,
    bits: usize,
}

impl<T: Real> PamAxis<T> {
    /// Unit-energy PAM axis with `len` points spaced by `spacing`, descending.
    fn new(len: usize, spacing: T) -> Self {
        let bits = len.trailing_zeros() as usize;
        let half = spacing / T::lit(2.0);
        let points = (0..len)
            .map(|a| T::lit((len - 1) as f64 - 2.0 * a as f64) * half)
            .collect();
        let labels = (0..len as u32).map(|a| a ^ (a >> 1)).collect();
        Self {
            points,
            spacing,
            labels,
            bits,
        }
    }

    /// Number of points `L`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Amplitudes, strictly descending.
    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn point(&self, k: usize) -> T {
        self.points[k]
    }

    /// Distance between adjacent points.
    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Bits carried by this axis (`q/2`).
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Gray label of point `k` as an integer of width [`bits`](Self::bits).
    pub fn label(&self, k: usize) -> u32 {
        self.labels[k]
    }

    /// Bit `n` (0-based, most significant first) of point `k`'s label.
    #[inline]
    pub fn bit(&self, k: usize, n: usize) -> bool {
        (self.labels[k] >> (self.bits - 1 - n)) & 1 == 1
    }

    /// Position of the point carrying `label`.
    pub fn index_of_label(&self, label: u32) -> usize {
        // inverse binary-reflected Gray code
        let mut value = label;
        let mut shift = label >> 1;
        while shift != 0 {
            value ^= shift;
            shift >>= 1;
        }
        value as usize
    }
}

/// Square M-QAM constellation with Gray labels and unit average energy.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation<T> {
    order: usize,
    bits: usize,
    axis: PamAxis<T>,
    symbols: Vec<Complex<T>>,
}

/// Builds the unit-energy square `order`-QAM constellation.
///
/// `order` must be a power of 4 between 4 and 65536.
pub fn build_constellation<T: Real>(order: usize) -> Result<Constellation<T>> {
    if order < 4
        || !order.is_power_of_two()
        || !order.trailing_zeros().is_multiple_of(2)
        || order > 1 << 16
    {
        return Err(Error::InvalidOrder(order));
    }
    let bits = order.trailing_zeros() as usize;
    let len = 1usize << (bits / 2);
    // d = 2 / sqrt(2(M-1)/3) gives E|s|² = 1
    let spacing = T::lit(2.0) / T::lit(2.0 * (order as f64 - 1.0) / 3.0).sqrt();
    let axis = PamAxis::new(len, spacing);
    let half = bits / 2;
    let symbols = (0..order)
        .map(|k| {
            let re = axis.index_of_label((k >> half) as u32);
            let im = axis.index_of_label((k & (len - 1)) as u32);
            Complex::new(axis.point(re), axis.point(im))
        })
        .collect();
    Ok(Constellation {
        order,
        bits,
        axis,
        symbols,
    })
}

impl<T: Real> Constellation<T> {
    /// Constellation size `M`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Bits per symbol `q = log₂M`.
    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    /// Points per axis `L = √M`.
    pub fn axis_len(&self) -> usize {
        self.axis.len()
    }

    pub fn real_axis(&self) -> &PamAxis<T> {
        &self.axis
    }

    pub fn imag_axis(&self) -> &PamAxis<T> {
        &self.axis
    }

    pub fn symbols(&self) -> &[Complex<T>] {
        &self.symbols
    }

    #[inline]
    pub fn symbol(&self, index: usize) -> Complex<T> {
        self.symbols[index]
    }

    /// Bit `n` (0-based, `0..q`) of symbol `index`'s label.
    #[inline]
    pub fn bit(&self, index: usize, n: usize) -> bool {
        (index >> (self.bits - 1 - n)) & 1 == 1
    }

    /// PAM positions `(real, imag)` of symbol `index`.
    #[inline]
    pub fn axis_indices(&self, index: usize) -> (usize, usize) {
        let half = self.bits / 2;
        (
            self.axis.index_of_label((index >> half) as u32),
            self.axis
                .index_of_label((index & (self.axis.len() - 1)) as u32),
        )
    }

    /// Symbol index whose real part is PAM point `re` and imaginary part `im`.
    #[inline]
    pub fn index_from_axes(&self, re: usize, im: usize) -> usize {
        ((self.axis.label(re) as usize) << (self.bits / 2)) | self.axis.label(im) as usize
    }

    /// Index of the symbol labeled `bits` (most significant first).
    pub fn index_from_bits(&self, bits: &[bool]) -> Result<usize> {
        if bits.len() != self.bits {
            return Err(Error::DimensionMismatch {
                expected: format!("{} bits", self.bits),
                actual: format!("{} bits", bits.len()),
            });
        }
        Ok(bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
    }

    pub fn bits_to_symbol(&self, bits: &[bool]) -> Result<Complex<T>> {
        Ok(self.symbols[self.index_from_bits(bits)?])
    }

    pub fn symbol_to_bits(&self, index: usize) -> Result<Vec<bool>> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.order,
            });
        }
        Ok((0..self.bits).map(|n| self.bit(index, n)).collect())
    }

    /// Mean of `|s|²` over the alphabet.
    pub fn average_energy(&self) -> T {
        let total = self
            .symbols
            .iter()
            .fold(T::zero(), |acc, s| acc + s.norm_sqr());
        total / T::lit(self.order as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn qpsk_axis() {
        let c = build_constellation::<f64>(4).unwrap();
        let x = c.real_axis();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x.point(0) - r).abs() < 1e-15);
        assert!((x.point(1) + r).abs() < 1e-15);
        assert!((x.spacing() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            c.bits_to_symbol(&[false, false]).unwrap(),
            Complex::new(x.point(0), x.point(0))
        );
    }

    #[test]
    fn qam16_axis() {
        let c = build_constellation::<f64>(16).unwrap();
        let s = 10f64.sqrt();
        let expected = [3.0 / s, 1.0 / s, -1.0 / s, -3.0 / s];
        for (p, e) in c.real_axis().points().iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
        assert!((c.real_axis().spacing() - 2.0 / s).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_orders() {
        for m in [0, 1, 2, 3, 8, 12, 32, 128, 1 << 18] {
            assert_eq!(build_constellation::<f64>(m), Err(Error::InvalidOrder(m)));
        }
    }

    #[test]
    fn unit_energy_and_pam_half_energy() {
        for m in [4, 16, 64, 256, 1024] {
            let c = build_constellation::<f64>(m).unwrap();
            assert!((c.average_energy() - 1.0).abs() < 1e-12, "M={m}");
            let axis = c.real_axis();
            let e = axis.points().iter().map(|p| p * p).sum::<f64>() / axis.len() as f64;
            assert!((e - 0.5).abs() < 1e-12);
            for w in axis.points().windows(2) {
                assert!((w[0] - w[1] - axis.spacing()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn labels_are_balanced_bijection() {
        for m in [4, 16, 64, 256] {
            let c = build_constellation::<f64>(m).unwrap();
            let q = c.bits_per_symbol();
            let labels: HashSet<Vec<bool>> = (0..m).map(|k| c.symbol_to_bits(k).unwrap()).collect();
            assert_eq!(labels.len(), m);
            let points: HashSet<(u64, u64)> = c
                .symbols()
                .iter()
                .map(|s| (s.re.to_bits(), s.im.to_bits()))
                .collect();
            assert_eq!(points.len(), m);
            for n in 0..q {
                let ones = (0..m).filter(|&k| c.bit(k, n)).count();
                assert_eq!(ones, m / 2);
            }
        }
    }

    #[test]
    fn gray_property_on_both_axes() {
        for m in [4, 16, 64, 256] {
            let c = build_constellation::<f64>(m).unwrap();
            let l = c.axis_len();
            for a in 0..l {
                for b in 0..l {
                    let k = c.index_from_axes(a, b);
                    if a + 1 < l {
                        assert_eq!((k ^ c.index_from_axes(a + 1, b)).count_ones(), 1);
                    }
                    if b + 1 < l {
                        assert_eq!((k ^ c.index_from_axes(a, b + 1)).count_ones(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn axis_separability() {
        let c = build_constellation::<f64>(64).unwrap();
        for k in 0..64 {
            let (a, b) = c.axis_indices(k);
            assert_eq!(
                c.symbol(k),
                Complex::new(c.real_axis().point(a), c.imag_axis().point(b))
            );
            assert_eq!(c.index_from_axes(a, b), k);
        }
        // flipping a real-axis bit keeps the imaginary part
        let c16 = build_constellation::<f64>(16).unwrap();
        let s = c16.bits_to_symbol(&[false, true, true, false]).unwrap();
        let t = c16.bits_to_symbol(&[true, true, true, false]).unwrap();
        assert_eq!(s.im, t.im);
        assert_ne!(s.re, t.re);
    }

    #[test]
    fn symbol_to_bits_edges() {
        let c = build_constellation::<f64>(16).unwrap();
        assert_eq!(c.symbol_to_bits(0).unwrap(), vec![false; 4]);
        assert!(matches!(
            c.symbol_to_bits(16),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(c.bits_to_symbol(&[true; 3]).is_err());
    }

    #[test]
    fn deterministic_construction() {
        assert_eq!(
            build_constellation::<f64>(64).unwrap(),
            build_constellation::<f64>(64).unwrap()
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bits_round_trip(exp in 1usize..=4, raw in any::<u32>()) {
                let m = 1usize << (2 * exp);
                let c = build_constellation::<f64>(m).unwrap();
                let k = raw as usize % m;
                let bits = c.symbol_to_bits(k).unwrap();
                prop_assert_eq!(c.index_from_bits(&bits).unwrap(), k);
                prop_assert_eq!(c.bits_to_symbol(&bits).unwrap(), c.symbol(k));
            }
        }
    }
}
