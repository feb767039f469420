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

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FlowId, SlotFlow};

/// Attribute the flow set is sorted by before slicing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionBasis {
    #[default]
    Period,
    Length,
    /// Bytes per slot, `l / p`.
    Bandwidth,
}

impl PartitionBasis {
    fn compare(self, a: &SlotFlow, b: &SlotFlow) -> Ordering {
        match self {
            Self::Period => a.period.cmp(&b.period),
            Self::Length => a.length.cmp(&b.length),
            Self::Bandwidth => {
                (a.length as u128 * b.period as u128).cmp(&(b.length as u128 * a.period as u128))
            }
        }
    }
}

impl FromStr for PartitionBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "period" => Ok(Self::Period),
            "length" => Ok(Self::Length),
            "bandwidth" => Ok(Self::Bandwidth),
            _ => Err(Error::InvalidConfig(format!("unknown partition basis {s:?}"))),
        }
    }
}

impl fmt::Display for PartitionBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Period => "period",
            Self::Length => "length",
            Self::Bandwidth => "bandwidth",
        })
    }
}

/// Consecutive slices of the basis-sorted flow set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub basis: PartitionBasis,
    pub scale: usize,
    pub partitions: Vec<Vec<FlowId>>,
}

impl PartitionPlan {
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }
}

/// Sorts ascending by `basis` (ties by id) and slices into chunks of at most `scale`.
pub fn partition_flows(flows: &[SlotFlow], basis: PartitionBasis, scale: usize) -> Result<PartitionPlan> {
    if scale == 0 {
        return Err(Error::InvalidConfig("partition scale must be at least 1".into()));
    }
    let mut order: Vec<&SlotFlow> = flows.iter().collect();
    order.sort_by(|a, b| basis.compare(a, b).then(a.id.cmp(&b.id)));
    let partitions = order.chunks(scale).map(|c| c.iter().map(|f| f.id).collect()).collect();
    Ok(PartitionPlan { basis, scale, partitions })
}

/// Order in which a partition's flows are offered to the offset search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "seed")]
#[derive(Default)]
pub enum SortStrategy {
    Random(u64),
    PeriodAsc,
    PeriodDesc,
    LengthAsc,
    #[default]
    LengthDesc,
    OffsetBoundAsc,
    OffsetBoundDesc,
}


impl FromStr for SortStrategy {
    type Err = Error;

    /// Accepts `period-asc`, `length-desc`, `offset-bound-asc`, ... and `random:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(seed) = s.strip_prefix("random:") {
            return seed
                .parse()
                .map(Self::Random)
                .map_err(|_| Error::InvalidConfig(format!("bad random seed in {s:?}")));
        }
        Ok(match s {
            "random" => Self::Random(0),
            "period-asc" => Self::PeriodAsc,
            "period-desc" => Self::PeriodDesc,
            "length-asc" => Self::LengthAsc,
            "length-desc" => Self::LengthDesc,
            "offset-bound-asc" => Self::OffsetBoundAsc,
            "offset-bound-desc" => Self::OffsetBoundDesc,
            _ => return Err(Error::InvalidConfig(format!("unknown sort strategy {s:?}"))),
        })
    }
}

impl fmt::Display for SortStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Random(seed) => write!(f, "random:{seed}"),
            Self::PeriodAsc => f.write_str("period-asc"),
            Self::PeriodDesc => f.write_str("period-desc"),
            Self::LengthAsc => f.write_str("length-asc"),
            Self::LengthDesc => f.write_str("length-desc"),
            Self::OffsetBoundAsc => f.write_str("offset-bound-asc"),
            Self::OffsetBoundDesc => f.write_str("offset-bound-desc"),
        }
    }
}

/// Deterministic scheduling order; every key is tie-broken by flow id.
pub fn sort_for_scheduling<'a>(flows: &[&'a SlotFlow], strategy: SortStrategy) -> Vec<&'a SlotFlow> {
    let mut out = flows.to_vec();
    let key = |f: &SlotFlow| match strategy {
        SortStrategy::PeriodAsc | SortStrategy::PeriodDesc => f.period,
        SortStrategy::LengthAsc | SortStrategy::LengthDesc => f.length,
        SortStrategy::OffsetBoundAsc | SortStrategy::OffsetBoundDesc => f.offset_bound(),
        SortStrategy::Random(_) => 0,
    };
    let descending = matches!(
        strategy,
        SortStrategy::PeriodDesc | SortStrategy::LengthDesc | SortStrategy::OffsetBoundDesc
    );
    out.sort_by(|a, b| {
        let primary = key(a).cmp(&key(b));
        let primary = if descending { primary.reverse() } else { primary };
        primary.then(a.id.cmp(&b.id))
    });
    if let SortStrategy::Random(seed) = strategy {
        out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    out
}
