//! Unsigned machine words that carry L-bit hash values.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{PrimInt, Unsigned, WrappingAdd, WrappingMul, WrappingSub};

/// An unsigned word wide enough to hold an L-bit hash value.
///
/// Implemented for `u32` (L ≤ 32) and `u64` (L ≤ 64). All hash arithmetic is
/// carried out in the word and masked back to L bits.
pub trait HashWord:
    PrimInt
    + Unsigned
    + WrappingAdd
    + WrappingSub
    + WrappingMul
    + Hash
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    const BITS: u32;

    /// Truncating conversion.
    fn from_u64(v: u64) -> Self;

    fn to_u64(self) -> u64;

    /// The mask selecting the low `width` bits.
    #[inline]
    fn low_mask(width: u32) -> Self {
        debug_assert!(width >= 1 && width <= Self::BITS);
        if width == Self::BITS {
            Self::max_value()
        } else {
            (Self::one() << width as usize) - Self::one()
        }
    }
}

impl HashWord for u32 {
    const BITS: u32 = 32;

    #[inline]
    fn from_u64(v: u64) -> Self {
        v as u32
    }

    #[inline]
    fn to_u64(self) -> u64 {
        self as u64
    }
}

impl HashWord for u64 {
    const BITS: u32 = 64;

    #[inline]
    fn from_u64(v: u64) -> Self {
        v
    }

    #[inline]
    fn to_u64(self) -> u64 {
        self
    }
}
