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

use crate::arith::{extended_euclid, gcd, lcm, modulo};
use crate::error::{Error, Result};
use crate::hypergraph::FeatureTuple;

/// Common slots of all progressions as one progression `(q̈, p̈)`, `p̈ = lcm` of the
/// periods. Folds from `(0, 1)`; each step solves `z ≡ q̇ (mod ṗ)`, `z ≡ q (mod p̊)`.
pub fn position_confluence_slots(tuples: &[FeatureTuple]) -> Result<FeatureTuple> {
    let (mut q_acc, mut p_acc) = (0u64, 1u64);
    for t in tuples {
        let g = gcd(p_acc, t.period);
        let diff = t.q as i128 - q_acc as i128;
        if diff % g as i128 != 0 {
            return Err(Error::NotConfluent(format!(
                "{t:?} shares no slot with the progression ({q_acc}, {p_acc})"
            )));
        }
        let p_next = lcm(p_acc, t.period)
            .map_err(|_| Error::ArithmeticOverflow(format!("lcm({p_acc}, {}) exceeds 64 bits", t.period)))?;
        // x̃ only matters modulo p̊/g since ṗ·(p̊/g) = p̈.
        let step = t.period / g;
        let (x, _, _) = extended_euclid(p_acc, t.period);
        let x = modulo(x as i128, step) as u128;
        let k = modulo(diff / g as i128, step) as u128;
        let x_tilde = (x * k % step as u128) as u64;
        let q_next = (q_acc as u128 + x_tilde as u128 * p_acc as u128) % p_next as u128;
        q_acc = q_next as u64;
        p_acc = p_next;
    }
    Ok(FeatureTuple::new(q_acc, p_acc))
}
