use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;

/// A half-integer stored exactly as twice its value.
///
/// Used for total spins `j`, projections `m`, and the Kraus labels `J, M`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Integer value, if `self` is an integer.
    pub fn to_int(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// Irrep dimension `2j + 1`.
    pub fn dim(self) -> usize {
        assert!(self.0 >= 0, "dimension of negative spin {self}");
        self.0 as usize + 1
    }

    /// Projections `j, j-1, ..., -j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let j = self.0;
        (0..=j.max(-1)).map(move |k| HalfInt(j - 2 * k))
    }

    /// All spins `0, 1/2, 1, ..., self`.
    pub fn spins_up_to(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        (0..=self.0).map(HalfInt)
    }

    /// Whether `m` is a valid projection inside irrep `self`.
    pub fn admits(self, m: HalfInt) -> bool {
        self.0 >= 0 && m.0.abs() <= self.0 && (self.0 - m.0) % 2 == 0
    }

    /// Position of projection `m` in the basis order `m = j, ..., -j`.
    pub fn offset_of(self, m: HalfInt) -> usize {
        debug_assert!(self.admits(m));
        ((self.0 - m.0) / 2) as usize
    }
}

/// `(-1)^n` for an integer-valued half-integer.
pub fn parity_sign(n: HalfInt) -> f64 {
    debug_assert!(n.is_integer(), "sign of non-integer exponent {n}");
    if (n.0 / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Triangle rule `|a - b| <= c <= a + b` together with integer `a + b + c`.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    (a.0 - b.0).abs() <= c.0 && c.0 <= a.0 + b.0 && (a.0 + b.0 + c.0) % 2 == 0
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: Self) -> Self {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: Self) -> Self {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> Self {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3/2"`, `"-1/2"`, `"2"`, and the redundant `"4/2"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::ParseHalfInt(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((num, den)) => {
                let num: i32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "2" => Ok(HalfInt(num)),
                    "1" => Ok(HalfInt(2 * num)),
                    _ => Err(bad()),
                }
            }
            None => {
                let n: i32 = t.parse().map_err(|_| bad())?;
                Ok(HalfInt(2 * n))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["0", "1/2", "-1/2", "3/2", "2", "-3"] {
            let h: HalfInt = s.parse().unwrap();
            assert_eq!(h.to_string(), s);
        }
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), HalfInt::from_int(2));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
    }

    #[test]
    fn projections_run_downward() {
        let m: Vec<_> = HalfInt::from_twice(3).projections().collect();
        assert_eq!(m, [3, 1, -1, -3].map(HalfInt::from_twice));
        assert_eq!(HalfInt::ZERO.projections().count(), 1);
    }

    #[test]
    fn admits_checks_parity_and_range() {
        let j = HalfInt::from_int(1);
        assert!(j.admits(HalfInt::ZERO));
        assert!(!j.admits(HalfInt::HALF));
        assert!(!j.admits(HalfInt::from_int(2)));
        assert_eq!(j.offset_of(HalfInt::from_int(-1)), 2);
    }

    #[test]
    fn signs_and_triangles() {
        assert_eq!(parity_sign(HalfInt::from_int(3)), -1.0);
        assert_eq!(parity_sign(HalfInt::from_int(-2)), 1.0);
        assert!(triangle(HalfInt::HALF, HalfInt::HALF, HalfInt::ZERO));
        assert!(!triangle(HalfInt::ONE, HalfInt::ONE, HalfInt::from_int(3)));
        assert!(!triangle(HalfInt::HALF, HalfInt::ONE, HalfInt::ONE));
    }

    proptest::proptest! {
        #[test]
        fn display_round_trips(t in -400i32..400) {
            let h = HalfInt::from_twice(t);
            proptest::prop_assert_eq!(h.to_string().parse::<HalfInt>().unwrap(), h);
        }

        #[test]
        fn triangle_is_symmetric(a in 0i32..12, b in 0i32..12, c in 0i32..12) {
            let (a, b, c) = (HalfInt::from_twice(a), HalfInt::from_twice(b), HalfInt::from_twice(c));
            proptest::prop_assert_eq!(triangle(a, b, c), triangle(b, c, a));
            proptest::prop_assert_eq!(triangle(a, b, c), triangle(b, a, c));
        }
    }
}
