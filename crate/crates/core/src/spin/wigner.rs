use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::half::{parity_sign, triangle, HalfInt};

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
///
/// Racah's single-sum formula evaluated in exact integer arithmetic; the only
/// rounding happens in the final square root. Invalid arguments give 0.
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    if !(j1.admits(m1) && j2.admits(m2) && j3.admits(m3)) {
        return 0.0;
    }
    if (m1 + m2 + m3) != HalfInt::ZERO || !triangle(j1, j2, j3) {
        return 0.0;
    }
    // every combination below is an integer once the selection rules hold
    let int = |h: HalfInt| -> i64 { h.to_int().expect("integer combination") as i64 };

    let t1 = int(j1 + j2 - j3);
    let t2 = int(j1 - j2 + j3);
    let t3 = int(-j1 + j2 + j3);
    let big = int(j1 + j2 + j3) + 1;

    let a = int(j3 - j2 + m1);
    let b = int(j3 - j1 - m2);
    let c = int(j1 + j2 - j3);
    let d = int(j1 - m1);
    let e = int(j2 + m2);
    let k_min = 0.max(-a).max(-b);
    let k_max = c.min(d).min(e);
    if k_min > k_max {
        return 0.0;
    }

    // Σ_k (-1)^k / [k! (a+k)! (b+k)! (c-k)! (d-k)! (e-k)!], brought onto the
    // common denominator formed by the largest value of each factorial
    let denom = fact(k_max) * fact(a + k_max) * fact(b + k_max) * fact(c - k_min) * fact(d - k_min) * fact(e - k_min);
    let mut sum = BigInt::zero();
    for k in k_min..=k_max {
        let dk = fact(k) * fact(a + k) * fact(b + k) * fact(c - k) * fact(d - k) * fact(e - k);
        let term = &denom / dk;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    let radicand_num = fact(t1) * fact(t2) * fact(t3)
        * fact(int(j1 + m1)) * fact(int(j1 - m1))
        * fact(int(j2 + m2)) * fact(int(j2 - m2))
        * fact(int(j3 + m3)) * fact(int(j3 - m3));
    let radicand_den = fact(big);

    let negative = sum.is_negative();
    let square = ratio_to_f64(&(radicand_num * &sum * &sum), &(radicand_den * &denom * &denom));
    let magnitude = square.sqrt();
    let sign = parity_sign(j1 - j2 - m3) * if negative { -1.0 } else { 1.0 };
    sign * magnitude
}

fn fact(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `num / den` for positive big integers of any size.
fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 { (num << shift as usize) / den } else { num / (den << (-shift) as usize) };
    q.to_f64().unwrap() * 2f64.powi(-shift as i32)
}
