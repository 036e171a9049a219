//! Stochastic uniform quantization of model deltas.

use nalgebra::DVector;

use super::LearningError;
use crate::rng::SimRng;
use crate::units::Bits;

/// Size in bits of the range value sent alongside the level indices.
pub const RANGE_BITS: u32 = 32;
/// Bits per coordinate of an unquantized model.
pub const FULL_PRECISION_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizerConfig {
    bits: u32,
}

impl QuantizerConfig {
    pub fn new(bits: u32) -> Result<Self, LearningError> {
        if (1..=32).contains(&bits) {
            Ok(Self { bits })
        } else {
            Err(LearningError::InvalidParameter(
                "quantizer bits must be in 1..=32",
            ))
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// `b·d + 32`.
    pub fn payload(self, dim: usize) -> Bits {
        Bits::new((self.bits as usize * dim) as f64 + RANGE_BITS as f64).expect("non-negative")
    }
}

/// One quantized delta: `2^b` levels evenly spaced over `[-R, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedMessage {
    bits: u32,
    range: f32,
    levels: Vec<u32>,
}

impl QuantizedMessage {
    pub fn range(&self) -> f32 {
        self.range
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn payload(&self) -> Bits {
        Bits::new((self.bits as usize * self.levels.len()) as f64 + RANGE_BITS as f64)
            .expect("non-negative")
    }

    pub fn dequantize(&self) -> DVector<f64> {
        let r = self.range as f64;
        let step = level_step(r, self.bits);
        DVector::from_iterator(
            self.levels.len(),
            self.levels.iter().map(|&j| -r + j as f64 * step),
        )
    }
}

fn level_step(range: f64, bits: u32) -> f64 {
    let intervals = ((1u64 << bits) - 1) as f64;
    2.0 * range / intervals
}

/// Smallest `f32` that is `>= x` (for finite non-negative `x`).
fn f32_at_least(x: f64) -> f32 {
    let r = x as f32;
    if (r as f64) < x {
        f32::from_bits(r.to_bits() + 1)
    } else {
        r
    }
}

/// Quantizes `delta` onto `2^b` levels over `[-R, R]`, `R = max|delta_i|`
/// rounded up to the nearest `f32` so that the transmitted range still covers
/// every entry. Each entry rounds to one of its two neighbouring levels with
/// probabilities that make the dequantized value unbiased.
pub fn quantize(
    delta: &DVector<f64>,
    config: QuantizerConfig,
    rng: &mut SimRng,
) -> QuantizedMessage {
    let range = f32_at_least(delta.amax());
    assert!(range.is_finite(), "delta range overflows f32");
    let bits = config.bits;
    if range == 0.0 {
        return QuantizedMessage {
            bits,
            range,
            levels: vec![0; delta.len()],
        };
    }
    let r = range as f64;
    let step = level_step(r, bits);
    let top = (1u64 << bits) - 1;
    let levels = delta
        .iter()
        .map(|&x| {
            let pos = ((x + r) / step).clamp(0.0, top as f64);
            let lo = (pos.floor() as u64).min(top - 1);
            let frac = pos - lo as f64;
            let j = if rng.next_uniform() < frac {
                lo + 1
            } else {
                lo
            };
            j as u32
        })
        .collect();
    QuantizedMessage {
        bits,
        range,
        levels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use proptest::prelude::*;

    #[test]
    fn payload_matches_bd_plus_32() {
        let q = QuantizerConfig::new(4).unwrap();
        assert_eq!(q.payload(100).value(), 432.0);
        let msg = quantize(&DVector::from_element(100, 0.5), q, &mut Seed(1).rng());
        assert_eq!(msg.payload().value(), 432.0);
    }

    #[test]
    fn rejects_bad_bit_widths() {
        assert!(QuantizerConfig::new(0).is_err());
        assert!(QuantizerConfig::new(33).is_err());
    }

    #[test]
    fn thirty_two_bits_is_near_lossless() {
        let mut rng = Seed(5).rng();
        let x = DVector::from_fn(50, |i, _| (i as f64 - 25.0) * 0.37 + 0.001);
        let msg = quantize(&x, QuantizerConfig::new(32).unwrap(), &mut rng);
        let err = (msg.dequantize() - &x).amax();
        assert!(err <= 1e-6 * x.amax(), "{err}");
    }

    #[test]
    fn one_bit_is_unbiased() {
        let q = QuantizerConfig::new(1).unwrap();
        let x = DVector::from_vec(vec![0.3, 1.0]);
        let mut rng = Seed(21).rng();
        let n = 100_000;
        let mean = (0..n)
            .map(|_| quantize(&x, q, &mut rng).dequantize()[0])
            .sum::<f64>()
            / n as f64;
        assert!((0.29..=0.31).contains(&mean), "{mean}");
    }

    #[test]
    fn zero_delta_is_sentinel() {
        let msg = quantize(
            &DVector::zeros(8),
            QuantizerConfig::new(3).unwrap(),
            &mut Seed(0).rng(),
        );
        assert_eq!(msg.range(), 0.0);
        assert_eq!(msg.dequantize(), DVector::zeros(8));
        assert_eq!(msg.payload().value(), 3.0 * 8.0 + 32.0);
    }

    #[test]
    fn extreme_entries_are_exact() {
        let x = DVector::from_vec(vec![-2.0, 2.0, 0.0]);
        let msg = quantize(&x, QuantizerConfig::new(2).unwrap(), &mut Seed(0).rng());
        let y = msg.dequantize();
        assert_eq!(y[0], -2.0);
        assert_eq!(y[1], 2.0);
    }

    proptest! {
        #[test]
        fn dequantized_within_one_step(
            xs in proptest::collection::vec(-10.0f64..10.0, 1..20),
            bits in 1u32..=16,
            seed in any::<u64>(),
        ) {
            let x = DVector::from_vec(xs);
            let msg = quantize(&x, QuantizerConfig::new(bits).unwrap(), &mut Seed(seed).rng());
            let step = level_step(msg.range() as f64, bits);
            let y = msg.dequantize();
            prop_assert!((msg.range() as f64) >= x.amax());
            for (a, b) in x.iter().zip(y.iter()) {
                prop_assert!((a - b).abs() <= step * (1.0 + 1e-9));
            }
        }

        #[test]
        fn sample_mean_within_three_sigma(x in -1.0f64..1.0, bits in 1u32..=4, seed in any::<u64>()) {
            let v = DVector::from_vec(vec![x, 1.0]);
            let q = QuantizerConfig::new(bits).unwrap();
            let mut rng = Seed(seed).rng();
            let n = 4000;
            let draws: Vec<f64> = (0..n).map(|_| quantize(&v, q, &mut rng).dequantize()[0]).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            // per-draw variance of stochastic rounding is at most step^2 / 4
            let step = level_step(1.0, bits);
            let sigma = (step * step / 4.0 / n as f64).sqrt();
            prop_assert!((mean - x).abs() <= 3.0 * sigma + 1e-12, "mean {} x {} sigma {}", mean, x, sigma);
        }
    }
}
