//! Deterministic stratified train/validation/test splits.
//!
//! Records are grouped by the value of the stratification key. Within each
//! stratum they are sorted by id, shuffled by Fisher–Yates driven by a
//! [`KeyedRng`] keyed by the seed and the stratum's display string, and cut
//! into three consecutive runs whose sizes come from [`allocate`]. Strata
//! with fewer than three records go to train whole.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::keys::{KeyError, LabelKey, LabelValue};
use crate::formats::DatasetRecord;
use crate::rng::KeyedRng;

/// Fixed-point scale of [`SplitRatios`].
pub const RATIO_SCALE: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("bad ratios: {0}")]
    BadRatios(String),
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Train/validation/test fractions in millionths; they sum to exactly
/// [`RATIO_SCALE`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitRatios(pub [u64; 3]);

impl SplitRatios {
    pub fn new(parts: [u64; 3]) -> Result<Self, SplitError> {
        if parts.iter().any(|&p| p == 0) {
            return Err(SplitError::BadRatios("every ratio must be positive".into()));
        }
        if parts.iter().sum::<u64>() != RATIO_SCALE {
            return Err(SplitError::BadRatios("ratios must sum to 1".into()));
        }
        Ok(SplitRatios(parts))
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios([600_000, 200_000, 200_000])
    }
}

fn parse_fraction(s: &str) -> Result<u64, SplitError> {
    let bad = || SplitError::BadRatios(format!("{s:?} is not a decimal fraction with at most 6 places"));
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let frac = frac.trim_end_matches('0');
    if frac.len() > 6 {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac_val: u64 = if frac.is_empty() { 0 } else { format!("{frac:0<6}").parse().map_err(|_| bad())? };
    int.checked_mul(RATIO_SCALE).and_then(|i| i.checked_add(frac_val)).ok_or_else(bad)
}

impl FromStr for SplitRatios {
    type Err = SplitError;

    /// Parses `"0.6,0.2,0.2"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(SplitError::BadRatios(format!("expected three comma-separated values, got {}", parts.len())));
        }
        let mut out = [0u64; 3];
        for (o, p) in out.iter_mut().zip(&parts) {
            *o = parse_fraction(p)?;
        }
        SplitRatios::new(out)
    }
}

impl fmt::Display for SplitRatios {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: u64| {
            let s = format!("{}.{:06}", p / RATIO_SCALE, p % RATIO_SCALE);
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        };
        write!(f, "{},{},{}", show(self.0[0]), show(self.0[1]), show(self.0[2]))
    }
}

/// Largest-remainder allocation of `n` items to the three splits. Ties in
/// the remainder go to train, then validation, then test.
pub fn allocate(n: usize, ratios: SplitRatios) -> [usize; 3] {
    let n = n as u64;
    let mut sizes = [0u64; 3];
    let mut rems = [0u64; 3];
    for i in 0..3 {
        let exact = n * ratios.0[i];
        sizes[i] = exact / RATIO_SCALE;
        rems[i] = exact % RATIO_SCALE;
    }
    let mut left = n - sizes.iter().sum::<u64>();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| rems[b].cmp(&rems[a]).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    sizes.map(|s| s as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumSummary {
    pub value: String,
    pub size: usize,
    pub counts: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitAssignment {
    pub seed: u64,
    pub ratios: SplitRatios,
    pub stratify_key: String,
    pub assignment: BTreeMap<String, Split>,
    pub strata: Vec<StratumSummary>,
    pub warnings: Vec<String>,
}

impl SplitAssignment {
    /// `{id: split}` with ids in sorted order.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.assignment).expect("map of strings serializes");
        out.push('\n');
        out
    }

    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in self.assignment.values() {
            c[*s as usize] += 1;
        }
        c
    }
}

pub fn stratified_split(
    records: &[DatasetRecord],
    seed: u64,
    ratios: SplitRatios,
    key: &str,
) -> Result<SplitAssignment, SplitError> {
    let label_key: LabelKey = key.parse()?;
    let mut strata: BTreeMap<LabelValue, Vec<&str>> = BTreeMap::new();
    for r in records {
        strata.entry(label_key.require(r)?).or_default().push(&r.id);
    }

    let mut assignment = BTreeMap::new();
    let mut summaries = Vec::with_capacity(strata.len());
    let mut warnings = Vec::new();
    for (value, mut ids) in strata {
        ids.sort_unstable();
        let label = value.to_string();
        let counts = if ids.len() < 3 {
            warnings.push(format!("stratum {key}={label} has only {} record(s); assigned to train", ids.len()));
            [ids.len(), 0, 0]
        } else {
            KeyedRng::for_str(seed, &label).shuffle(&mut ids);
            allocate(ids.len(), ratios)
        };
        let mut pos = 0;
        for (split, &count) in Split::ALL.iter().zip(&counts) {
            for id in &ids[pos..pos + count] {
                if assignment.insert(id.to_string(), *split).is_some() {
                    return Err(SplitError::DuplicateId(id.to_string()));
                }
            }
            pos += count;
        }
        summaries.push(StratumSummary { value: label, size: ids.len(), counts });
    }
    Ok(SplitAssignment { seed, ratios, stratify_key: key.to_string(), assignment, strata: summaries, warnings })
}
