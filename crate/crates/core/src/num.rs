use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by the scoring code.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Default + Send + Sync + 'static {
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("scalar conversion from f64")
    }

    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("scalar conversion from usize")
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Sum + Debug + Default + Send + Sync + 'static {}
