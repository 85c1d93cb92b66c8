//! Enumerations: the diagonal pairing `N × N → N` and a bijection `N → Qⁿ`.
//!
//! Pairing walks the anti-diagonals `l + i = d + 1` alternating direction:
//! even diagonals run `l` downward from `d`, odd diagonals run `l` upward,
//! giving `(1,1), (2,1), (1,2), (1,3), (2,2), (3,1), (4,1), (3,2), …`.
//!
//! Rationals: index 1 is `0`; index `2m` is the `m`-th Calkin–Wilf rational
//! and `2m + 1` its negative. An `n`-tuple unpairs its index into a first
//! coordinate index and a remainder index for the other `n − 1` coordinates.

use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Position of `(l, i)` in the boustrophedon diagonal order (1-based).
pub fn pair_index(l: u64, i: u64) -> Result<u64> {
    if l == 0 || i == 0 {
        return Err(Error::invalid("pair_index arguments must be positive"));
    }
    let d = l + i - 1;
    let before = d * (d - 1) / 2;
    let offset = if d % 2 == 0 { d - l } else { l - 1 };
    Ok(before + offset + 1)
}

/// Inverse of [`pair_index`].
pub fn unpair_index(k: u64) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(Error::invalid("unpair_index argument must be positive"));
    }
    // smallest d with d(d+1)/2 >= k
    let mut d = ((((8 * k) as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as u64;
    while d * (d + 1) / 2 < k {
        d += 1;
    }
    while d > 1 && (d - 1) * d / 2 >= k {
        d -= 1;
    }
    let offset = k - d * (d - 1) / 2 - 1;
    let l = if d % 2 == 0 { d - offset } else { offset + 1 };
    Ok((l, d + 1 - l))
}

/// Exact rational with a positive denominator, in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: u64,
}

impl Rational {
    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        let g = gcd(num.unsigned_abs(), den).max(1);
        Ok(Rational {
            num: num / g as i64,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Stern's diatomic sequence: `fusc(0) = 0`, `fusc(1) = 1`.
fn fusc(mut n: u64) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    while n > 0 {
        if n & 1 == 1 {
            b += a;
        } else {
            a += b;
        }
        n >>= 1;
    }
    b
}

/// The `m`-th positive rational of the Calkin–Wilf sequence (`m ≥ 1`).
pub fn calkin_wilf(m: u64) -> Rational {
    debug_assert!(m >= 1);
    // consecutive fusc values are coprime
    Rational {
        num: fusc(m) as i64,
        den: fusc(m + 1),
    }
}

/// The `i`-th rational in the fixed enumeration of `Q` (`i ≥ 1`).
pub fn enumerate_rationals(i: u64) -> Result<Rational> {
    match i {
        0 => Err(Error::invalid("rational index must be positive")),
        1 => Ok(Rational { num: 0, den: 1 }),
        _ => {
            let q = calkin_wilf(i / 2);
            Ok(if i % 2 == 0 {
                q
            } else {
                Rational {
                    num: -q.num,
                    den: q.den,
                }
            })
        }
    }
}

/// A point of `Qⁿ`: the `index`-th element of the enumeration of `Qⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    pub index: u64,
    pub coords: Vec<Rational>,
}

impl RationalPoint {
    pub fn enumerate(index: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let mut coords = Vec::with_capacity(dim);
        let mut rest = index;
        for _ in 0..dim - 1 {
            let (first, tail) = unpair_index(rest)?;
            coords.push(enumerate_rationals(first)?);
            rest = tail;
        }
        coords.push(enumerate_rationals(rest)?);
        Ok(RationalPoint { index, coords })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|q| q.to_f64()).collect()
    }

    /// Euclidean norm of the point.
    pub fn norm(&self) -> f64 {
        self.coords
            .iter()
            .map(|q| q.to_f64() * q.to_f64())
            .sum::<f64>()
            .sqrt()
    }
}
