// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Integer helpers for slot arithmetic. Everything runs on `u64` with checked
//! overflow; intermediate products in the Bézout fold are widened to `i128`.

use crate::error::{Error, Result};

/// Binary (Stein) gcd; `gcd(0, b) = b`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a | b;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Least common multiple; errors instead of wrapping.
pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::ArithmeticOverflow(format!("lcm({a}, {b}) exceeds 64 bits")))
}

/// Folds [`lcm`] over an iterator, starting at 1.
pub fn lcm_all<I: IntoIterator<Item = u64>>(values: I) -> Result<u64> {
    values.into_iter().try_fold(1u64, lcm)
}

/// Extended Euclid: returns `(x, y, g)` with `a*x + b*y = g = gcd(a, b)`.
pub fn extended_euclid(a: u64, b: u64) -> (i64, i64, u64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_s as i64, old_t as i64, old_r as u64)
}

/// Euclidean remainder of a signed value by a positive modulus.
pub fn modulo(value: i128, modulus: u64) -> u64 {
    value.rem_euclid(modulus as i128) as u64
}
