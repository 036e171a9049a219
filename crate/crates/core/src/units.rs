//! Unit-carrying scalars and the finite real vector used for models.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Deref};

use nalgebra::DVector;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("{unit} must be finite and non-negative, got {value}")]
    Negative { unit: &'static str, value: f64 },
    #[error("probability must lie in [0, 1], got {0}")]
    OutOfUnitInterval(f64),
    #[error("vector entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
}

macro_rules! non_negative_unit {
    ($(#[$meta:meta])* $name:ident, $unit:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
        #[serde(transparent)]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);

            pub fn new(value: f64) -> Result<Self, UnitError> {
                if value.is_finite() && value >= 0.0 {
                    // normalizes -0.0
                    Ok(Self(value + 0.0))
                } else {
                    Err(UnitError::Negative { unit: $unit, value })
                }
            }

            #[inline]
            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: Self) {
                self.0 += rhs.0;
            }
        }

        impl Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                iter.fold(Self::ZERO, Add::add)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} {}", self.0, $unit)
            }
        }

        impl TryFrom<f64> for $name {
            type Error = UnitError;
            fn try_from(value: f64) -> Result<Self, UnitError> {
                Self::new(value)
            }
        }
    };
}

non_negative_unit!(
    /// Energy in joules.
    Joules,
    "J"
);
non_negative_unit!(
    /// Time in seconds.
    Seconds,
    "s"
);
non_negative_unit!(
    /// Payload size in bits. Kept real-valued because mean packet sizes are.
    Bits,
    "bit"
);
non_negative_unit!(
    /// Power in watts.
    Watts,
    "W"
);

impl Watts {
    /// Energy spent drawing this power for `duration`.
    pub fn over(self, duration: Seconds) -> Joules {
        Joules(self.0 * duration.0)
    }
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Self = Self(0.0);
    pub const ONE: Self = Self(1.0);

    pub fn new(value: f64) -> Result<Self, UnitError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value + 0.0))
        } else {
            Err(UnitError::OutOfUnitInterval(value))
        }
    }

    /// Clamps round-off excursions back into `[0, 1]`. Panics on NaN.
    pub fn saturating(value: f64) -> Self {
        assert!(!value.is_nan(), "probability is NaN");
        Self(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense vector of finite reals (a model, a dual variable, a data row).
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector(DVector<f64>);

impl RealVector {
    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn from_vec(entries: Vec<f64>) -> Result<Self, UnitError> {
        Self::from_dvector(DVector::from_vec(entries))
    }

    pub fn from_dvector(v: DVector<f64>) -> Result<Self, UnitError> {
        if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(UnitError::NonFinite { index, value });
        }
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }
}

impl Deref for RealVector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_negative_and_non_finite() {
        assert!(Joules::new(-1e-12).is_err());
        assert!(Seconds::new(f64::NAN).is_err());
        assert!(Bits::new(f64::INFINITY).is_err());
        assert!(Watts::new(0.0).is_ok());
        assert!(Probability::new(1.0 + 1e-15).is_err());
        assert!(Probability::new(-0.0).is_ok());
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert!(Joules::new(-0.0).unwrap().value().is_sign_positive());
    }

    #[test]
    fn power_times_duration() {
        let e = Watts::new(0.1).unwrap().over(Seconds::new(0.33).unwrap());
        assert!((e.value() - 0.033).abs() < 1e-15);
    }

    #[test]
    fn real_vector_rejects_nan() {
        let err = RealVector::from_vec(vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, UnitError::NonFinite { index: 1, .. }));
    }

    proptest! {
        #[test]
        fn constructors_enforce_ranges(x in proptest::num::f64::ANY) {
            let ok = x.is_finite() && x >= 0.0;
            prop_assert_eq!(Joules::new(x).is_ok(), ok);
            prop_assert_eq!(Seconds::new(x).is_ok(), ok);
            prop_assert_eq!(Bits::new(x).is_ok(), ok);
            prop_assert_eq!(Watts::new(x).is_ok(), ok);
            prop_assert_eq!(Probability::new(x).is_ok(), (0.0..=1.0).contains(&x));
            if let Ok(j) = Joules::new(x) {
                prop_assert!(j.value() >= 0.0);
            }
        }

        #[test]
        fn sums_stay_in_range(xs in proptest::collection::vec(0.0f64..1e6, 0..20)) {
            let total: Joules = xs.iter().map(|&x| Joules::new(x).unwrap()).sum();
            prop_assert!(Joules::new(total.value()).is_ok());
        }
    }
}
