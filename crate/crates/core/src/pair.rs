use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error};

/// An unordered vertex pair stored canonically as `(min, max)`.
///
/// Vertex ids are 0-based; text formats shift them to 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub u: u32,
    pub v: u32,
}

impl Pair {
    /// Panics on a loop; use [`Pair::try_new`] for untrusted input.
    #[inline]
    pub fn new(a: u32, b: u32) -> Pair {
        assert_ne!(a, b, "a pair needs two distinct vertices");
        if a < b {
            Pair { u: a, v: b }
        } else {
            Pair { u: b, v: a }
        }
    }

    pub fn try_new(a: u32, b: u32) -> Result<Pair, Error> {
        if a == b {
            return Err(invalid("pair endpoints must differ"));
        }
        Ok(Pair::new(a, b))
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint other than `x`; `x` must be an endpoint.
    #[inline]
    pub fn other(&self, x: u32) -> u32 {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    #[inline]
    pub fn shared_vertex(&self, other: &Pair) -> Option<u32> {
        if other.contains(self.u) {
            Some(self.u)
        } else if other.contains(self.v) {
            Some(self.v)
        } else {
            None
        }
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Pair) -> bool {
        self.shared_vertex(other).is_none()
    }

    /// Position in the row-major enumeration of the strict upper triangle.
    #[inline]
    pub fn tri_index(&self, n: usize) -> usize {
        let u = self.u as usize;
        let v = self.v as usize;
        u * (2 * n - u - 1) / 2 + (v - u - 1)
    }

    #[inline]
    pub(crate) fn pack(&self) -> u32 {
        debug_assert!(self.v < 1 << 16);
        (self.u << 16) | self.v
    }

    #[inline]
    pub(crate) fn unpack(x: u32) -> Pair {
        Pair {
            u: x >> 16,
            v: x & 0xffff,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// Number of unordered pairs on `n` vertices.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}
