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

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::lcm_all;
use crate::error::{Error, Result};
use crate::model::{LinkId, SlotFlow};
use crate::scheduler::ScheduleSolution;

/// Largest hyper-period the oracle will materialise, in slots.
pub const DEFAULT_HORIZON_CAP: u64 = 1 << 22;

/// `C = lcm` of `periods`, bounded by [`DEFAULT_HORIZON_CAP`].
pub fn horizon<I: IntoIterator<Item = u64>>(periods: I) -> Result<u64> {
    horizon_with_cap(periods, DEFAULT_HORIZON_CAP)
}

pub fn horizon_with_cap<I: IntoIterator<Item = u64>>(periods: I, cap: u64) -> Result<u64> {
    let c = lcm_all(periods).map_err(|_| Error::HorizonTooLarge { horizon: u64::MAX as u128 + 1, cap })?;
    if c > cap {
        return Err(Error::HorizonTooLarge { horizon: c as u128, cap });
    }
    Ok(c)
}

/// Bytes carried by every slot of `[0, C)` on every link that carries traffic.
/// Per-slot totals are stored as `u32`; an addition past `u32::MAX` is an error.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotOccupancyMap {
    pub horizon: u64,
    pub links: BTreeMap<LinkId, Vec<u32>>,
}

impl SlotOccupancyMap {
    pub fn new(horizon: u64) -> Self {
        Self { horizon, links: BTreeMap::new() }
    }

    pub fn add(&mut self, link: LinkId, slot: u64, bytes: u64) -> Result<()> {
        let h = self.horizon as usize;
        let cell = &mut self.links.entry(link).or_insert_with(|| vec![0; h])[(slot % self.horizon) as usize];
        *cell = u32::try_from(bytes)
            .ok()
            .and_then(|b| cell.checked_add(b))
            .ok_or_else(|| Error::ArithmeticOverflow(format!("slot {slot} of link {link} exceeds u32 bytes")))?;
        Ok(())
    }

    pub fn get(&self, link: LinkId, slot: u64) -> u64 {
        self.links.get(&link).map_or(0, |s| s[(slot % self.horizon) as usize] as u64)
    }

    pub fn max(&self) -> u64 {
        self.links.keys().map(|&l| self.max_on(l)).max().unwrap_or(0)
    }

    pub fn max_on(&self, link: LinkId) -> u64 {
        self.links.get(&link).and_then(|s| s.iter().copied().max()).map_or(0, u64::from)
    }

    pub fn occupied_slots(&self, link: LinkId) -> usize {
        self.links.get(&link).map_or(0, |s| s.iter().filter(|&&b| b > 0).count())
    }

    /// `(link, slot, bytes)` for every slot strictly above `capacity`.
    pub fn overflowing(&self, capacity: u64) -> impl Iterator<Item = (LinkId, u64, u64)> + '_ {
        self.links.iter().flat_map(move |(&link, slots)| {
            slots
                .iter()
                .enumerate()
                .filter(move |&(_, &b)| b as u64 > capacity)
                .map(move |(s, &b)| (link, s as u64, b as u64))
        })
    }
}

/// Replays every frame of `flows` under `solution`.
///
/// A frame injected at `t` belongs to the first sub-flow of its parent with
/// `t ≡ basetime (mod period)` and uses that sub-flow's offset; otherwise it uses the
/// parent offset. It occupies slot `t + offset + depth` on every route link.
pub fn brute_force_occupancy(flows: &[SlotFlow], solution: &ScheduleSolution, cap: u64) -> Result<SlotOccupancyMap> {
    let c = horizon_with_cap(
        flows.iter().map(|f| f.period).chain(solution.subflows.iter().map(|s| s.period)),
        cap,
    )?;
    let mut map = SlotOccupancyMap::new(c);
    for flow in flows {
        let offset = solution.offset(flow.id).ok_or_else(|| Error::Schema(format!("no offset for flow {}", flow.id)))?;
        let subs: Vec<_> = solution.subflows.iter().filter(|s| s.parent == flow.id).collect();
        let slots: Vec<u64> = (flow.basetime..c)
            .step_by(flow.period as usize)
            .map(|t| t + subs.iter().find(|s| t % s.period == s.basetime).map_or(offset, |s| s.offset))
            .collect();
        let bytes = u32::try_from(flow.length)
            .map_err(|_| Error::ArithmeticOverflow(format!("frame of flow {} exceeds u32 bytes", flow.id)))?;
        for hop in &flow.hops {
            let cells = map.links.entry(hop.link).or_insert_with(|| vec![0; c as usize]);
            for &s in &slots {
                let cell = &mut cells[((s + hop.depth) % c) as usize];
                *cell = cell.checked_add(bytes).ok_or_else(|| {
                    Error::ArithmeticOverflow(format!("slot {} of link {} exceeds u32 bytes", s + hop.depth, hop.link))
                })?;
            }
        }
    }
    Ok(map)
}
