//! Per-layer activation functions.

use crate::scalar::{c, Scalar};

/// Slope of the leaky ReLU's negative branch.
pub const LEAKY_SLOPE: f64 = 0.2;

/// Activation tag attached to each layer.
///
/// Tags are part of the checkpoint format, so the discriminants are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Relu,
    /// Leaky ReLU with fixed slope 0.2.
    LeakyRelu,
    Sigmoid,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => {
                if x > T::zero() {
                    x
                } else {
                    T::zero()
                }
            }
            Activation::LeakyRelu => {
                if x > T::zero() {
                    x
                } else {
                    x * c::<T>(LEAKY_SLOPE)
                }
            }
            Activation::Sigmoid => T::one() / (T::one() + (-x).exp()),
            Activation::Linear => x,
        }
    }

    /// Derivative expressed through the activation output.
    ///
    /// The ReLU subgradient at 0 is 0, which keeps finite-difference
    /// comparisons well-posed away from the kink itself.
    #[inline]
    pub fn derivative_from_output<T: Scalar>(self, a: T) -> T {
        match self {
            Activation::Tanh => T::one() - a * a,
            Activation::Relu => {
                if a > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::LeakyRelu => {
                if a > T::zero() {
                    T::one()
                } else {
                    c::<T>(LEAKY_SLOPE)
                }
            }
            Activation::Sigmoid => a * (T::one() - a),
            Activation::Linear => T::one(),
        }
    }

    /// Stable byte tag used by the checkpoint format.
    pub fn tag(self) -> u8 {
        match self {
            Activation::Tanh => 0,
            Activation::Relu => 1,
            Activation::LeakyRelu => 2,
            Activation::Sigmoid => 3,
            Activation::Linear => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Activation> {
        match tag {
            0 => Some(Activation::Tanh),
            1 => Some(Activation::Relu),
            2 => Some(Activation::LeakyRelu),
            3 => Some(Activation::Sigmoid),
            4 => Some(Activation::Linear),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_finite_difference() {
        let acts = [
            Activation::Tanh,
            Activation::LeakyRelu,
            Activation::Sigmoid,
            Activation::Linear,
        ];
        let h = 1e-6;
        for act in acts {
            for &x in &[-1.3f64, -0.4, 0.7, 2.0] {
                let fd = (act.apply(x + h) - act.apply(x - h)) / (2.0 * h);
                let a = act.apply(x);
                let an = act.derivative_from_output(a);
                assert!((fd - an).abs() < 1e-8, "{act:?} at {x}: fd {fd} vs {an}");
            }
        }
    }

    #[test]
    fn relu_subgradient_at_zero_is_zero() {
        assert_eq!(Activation::Relu.derivative_from_output(0.0f64), 0.0);
        assert_eq!(Activation::Relu.apply(0.0f64), 0.0);
    }

    #[test]
    fn tag_roundtrip() {
        for act in [
            Activation::Tanh,
            Activation::Relu,
            Activation::LeakyRelu,
            Activation::Sigmoid,
            Activation::Linear,
        ] {
            assert_eq!(Activation::from_tag(act.tag()), Some(act));
        }
        assert_eq!(Activation::from_tag(9), None);
    }
}
