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

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CQF slot parameters shared by every link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotConfig {
    /// Slot length `T` in microseconds.
    pub slot_length_us: u64,
    /// Slot misalignment caused by synchronization error, microseconds.
    pub sync_error_us: u64,
    pub bandwidth_bps: u64,
    pub queue_depth_bits: u64,
    /// Share of the slot reserved for scheduled traffic, in `(0, 1]`.
    pub capacity_factor: f64,
    /// Replaces the derived capacity when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_override_bytes: Option<u64>,
}

impl Default for SlotConfig {
    fn default() -> Self {
        Self {
            slot_length_us: 125,
            sync_error_us: 2,
            bandwidth_bps: 1_000_000_000,
            queue_depth_bits: 1_000_000,
            capacity_factor: 0.8,
            capacity_override_bytes: None,
        }
    }
}

impl SlotConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slot_length_us == 0 {
            return Err(Error::InvalidConfig("slot length must be positive".into()));
        }
        if self.sync_error_us >= self.slot_length_us {
            return Err(Error::InvalidConfig(format!(
                "sync error {} us must be below the slot length {} us",
                self.sync_error_us, self.slot_length_us
            )));
        }
        if !(self.capacity_factor > 0.0 && self.capacity_factor <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "capacity factor {} outside (0, 1]",
                self.capacity_factor
            )));
        }
        Ok(())
    }

    /// Capacity used by the scheduler: the override, else [`slot_capacity`].
    pub fn capacity(&self) -> Result<u64> {
        match self.capacity_override_bytes {
            Some(bytes) => Ok(bytes),
            None => slot_capacity(self),
        }
    }
}

/// Bytes one slot can carry: `γ · min{(T − δ) · Γ, queue depth}` converted to bytes.
pub fn slot_capacity(config: &SlotConfig) -> Result<u64> {
    config.validate()?;
    let usable_us = (config.slot_length_us - config.sync_error_us) as u128;
    let transmit_bits = usable_us * config.bandwidth_bps as u128 / 1_000_000;
    let bits = transmit_bits.min(config.queue_depth_bits as u128);
    let bytes = config.capacity_factor * bits as f64 / 8.0;
    // Snap away representation noise of the factor (0.8 * 98400 etc.) before flooring.
    Ok(((bytes * 1e6).round() / 1e6).floor() as u64)
}
