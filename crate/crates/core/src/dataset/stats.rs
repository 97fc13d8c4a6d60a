//! Label distribution tables.

use std::collections::BTreeMap;

use serde::Serialize;

use super::csv_field;
use super::keys::{KeyError, LabelKey, LabelValue};
use crate::formats::DatasetRecord;

/// `100 * count / total` rounded to the nearest integer, ties upward.
pub fn percent_half_up(count: usize, total: usize) -> u64 {
    if total == 0 {
        return 0;
    }
    let (c, t) = (count as u128, total as u128);
    ((200 * c + t) / (2 * t)) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bucket {
    pub value: String,
    pub count: usize,
    pub percent: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelHistogram {
    pub key: String,
    pub total: usize,
    /// Ordered by label value.
    pub buckets: Vec<Bucket>,
}

impl LabelHistogram {
    pub fn count_of(&self, value: &str) -> Option<usize> {
        self.buckets.iter().find(|b| b.value == value).map(|b| b.count)
    }

    /// Values as columns, with a count row and a percentage row.
    pub fn to_markdown(&self) -> String {
        let cell = |s: &str| s.replace('|', "\\|");
        let mut head = format!("| {} |", cell(&self.key));
        let mut rule = String::from("|---|");
        let mut counts = String::from("| count |");
        let mut pct = String::from("| % |");
        for b in &self.buckets {
            head.push_str(&format!(" {} |", cell(&b.value)));
            rule.push_str("---:|");
            counts.push_str(&format!(" {} |", b.count));
            pct.push_str(&format!(" {}% |", b.percent));
        }
        format!("{head}\n{rule}\n{counts}\n{pct}\n")
    }

    /// `key,value,count,percent`, one line per bucket.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value,count,percent\n");
        for b in &self.buckets {
            out.push_str(&format!("{},{},{},{}\n", csv_field(&self.key), csv_field(&b.value), b.count, b.percent));
        }
        out
    }
}

pub fn label_distribution(records: &[DatasetRecord], key: &str) -> Result<LabelHistogram, KeyError> {
    let label_key: LabelKey = key.parse()?;
    let mut counts: BTreeMap<LabelValue, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(label_key.require(r)?).or_default() += 1;
    }
    let total = records.len();
    let buckets = counts
        .into_iter()
        .map(|(v, count)| Bucket { value: v.to_string(), count, percent: percent_half_up(count, total) })
        .collect();
    Ok(LabelHistogram { key: key.to_string(), total, buckets })
}
