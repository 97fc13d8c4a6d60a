//! Batch operations over dataset records: label recomputation and
//! verification, stratified splits and label distributions.
//!
//! Batch functions run in parallel over records and always return results in
//! input order.

pub mod keys;
pub mod split;
pub mod stats;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::formats::{DatasetRecord, SURFACE_NAMES};
use crate::homology::homology_profile;
use crate::manifold::{coherent_orientation, is_combinatorial_manifold, surface_class_from, ManifoldReport};

pub use keys::{KeyError, LabelKey, LabelValue};
pub use split::{allocate, stratified_split, Split, SplitAssignment, SplitError, SplitRatios};
pub use stats::{label_distribution, percent_half_up, Bucket, LabelHistogram};

/// A record with recomputed labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelOutcome {
    pub record: DatasetRecord,
    /// `None` for dimensions other than 2 and 3, or when the complex could
    /// not be built.
    pub report: Option<ManifoldReport>,
    /// Why the record could not be fully labelled.
    pub failure: Option<String>,
}

impl LabelOutcome {
    pub fn is_manifold(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.is_manifold)
    }
}

/// Recomputes every derivable label of `record`.
///
/// Homology labels, `dimension` and `n_vertices` are always refreshed. For
/// verified surfaces `orientable`, `genus` and `name` are set. For
/// 3-manifolds the stored `name` is kept and `orientable` is refreshed only
/// when the record already has it.
pub fn compute_labels(record: &DatasetRecord) -> LabelOutcome {
    let mut out = record.clone();
    let k = match record.complex() {
        Ok(k) => k,
        Err(e) => return LabelOutcome { record: out, report: None, failure: Some(e.to_string()) },
    };
    let profile = homology_profile(&k);
    out.dimension = k.dim();
    out.n_vertices = Some(k.n_vertices());
    out.betti_numbers = Some(profile.betti.iter().map(|&b| b as u64).collect());
    out.torsion_coefficients = Some(profile.torsion_strings());

    let report = match k.dim() {
        Some(2 | 3) => Some(is_combinatorial_manifold(&k).expect("dimension checked")),
        _ => None,
    };
    let failure = match &report {
        None => Some(format!("dimension {:?} is not 2 or 3", k.dim())),
        Some(r) if !r.is_manifold => Some(format!(
            "not a closed connected combinatorial manifold ({})",
            r.witnesses.iter().take(3).map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
        )),
        Some(_) => {
            let orientable = coherent_orientation(&k, 0).is_some();
            if k.dim() == Some(2) {
                let class = surface_class_from(k.euler_characteristic(), orientable);
                out.orientable = Some(class.orientable);
                out.genus = Some(class.genus);
                out.name = Some(class.name);
            } else if out.orientable.is_some() {
                out.orientable = Some(orientable);
            }
            None
        }
    };
    LabelOutcome { record: out, report, failure }
}

pub fn compute_labels_batch(records: &[DatasetRecord]) -> Vec<LabelOutcome> {
    records.par_iter().map(compute_labels).collect()
}

/// One stored value that disagrees with its recomputation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldMismatch {
    pub field: String,
    pub stored: String,
    pub computed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordCheck {
    pub index: usize,
    pub id: String,
    pub mismatches: Vec<FieldMismatch>,
    /// For 3-manifolds with a stored name: whether the homology is the one
    /// that name implies. Reported, never counted as a mismatch.
    pub name_consistent: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub records: usize,
    pub records_with_mismatch: usize,
    pub mismatches_by_field: BTreeMap<String, usize>,
    pub inconsistent_3d_names: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub summary: VerifySummary,
    /// Only records with at least one mismatch or an inconsistent name.
    pub records: Vec<RecordCheck>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.summary.records_with_mismatch == 0
    }

    /// `index,id,field,stored,computed`, one line per mismatch.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,id,field,stored,computed\n");
        for r in &self.records {
            for m in &r.mismatches {
                let row = [r.index.to_string(), r.id.clone(), m.field.clone(), m.stored.clone(), m.computed.clone()];
                out.push_str(&row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let s = &self.summary;
        let mut out = format!(
            "| records | with mismatch | inconsistent 3-manifold names |\n|---:|---:|---:|\n| {} | {} | {} |\n",
            s.records, s.records_with_mismatch, s.inconsistent_3d_names
        );
        if !s.mismatches_by_field.is_empty() {
            out.push_str("\n| field | mismatches |\n|---|---:|\n");
            for (f, n) in &s.mismatches_by_field {
                out.push_str(&format!("| {f} | {n} |\n"));
            }
        }
        if self.records.iter().any(|r| !r.mismatches.is_empty()) {
            out.push_str("\n| index | id | field | stored | computed |\n|---:|---|---|---|---|\n");
            for r in &self.records {
                for m in &r.mismatches {
                    out.push_str(&format!(
                        "| {} | {} | {} | {} | {} |\n",
                        r.index,
                        r.id,
                        m.field,
                        m.stored.replace('|', "\\|"),
                        m.computed.replace('|', "\\|")
                    ));
                }
            }
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Homology that a recognised 3-manifold name implies.
fn expected_3d_homology(name: &str) -> Option<(Vec<u64>, Vec<&'static str>)> {
    match name {
        "S^3" => Some((vec![1, 0, 0, 1], vec!["", "", "", ""])),
        "S^2 x S^1" => Some((vec![1, 1, 1, 1], vec!["", "", "", ""])),
        "S^2 twist S^1" => Some((vec![1, 1, 0, 0], vec!["", "", "Z_2", ""])),
        _ => None,
    }
}

fn is_recognized_surface_name(name: &str) -> bool {
    !name.is_empty() && SURFACE_NAMES.contains(&name)
}

/// Compares one record's stored labels with their recomputation.
pub fn check_record(index: usize, stored: &DatasetRecord) -> RecordCheck {
    let outcome = compute_labels(stored);
    let computed = &outcome.record;
    let mut mismatches = Vec::new();
    let mut compare = |field: &str, a: Option<String>, b: Option<String>| {
        if let Some(a) = a {
            let b = b.unwrap_or_else(|| "<none>".to_string());
            if a != b {
                mismatches.push(FieldMismatch { field: field.to_string(), stored: a, computed: b });
            }
        }
    };

    if let Some(reason) = &outcome.failure {
        compare("manifold", Some("true".into()), Some(format!("false: {reason}")));
    }
    compare("dimension", stored.dimension.map(|d| d.to_string()), computed.dimension.map(|d| d.to_string()));
    compare("n_vertices", stored.n_vertices.map(|d| d.to_string()), computed.n_vertices.map(|d| d.to_string()));
    compare(
        "betti_numbers",
        stored.betti_numbers.as_ref().map(render),
        computed.betti_numbers.as_ref().map(render),
    );
    compare(
        "torsion_coefficients",
        stored.torsion_coefficients.as_ref().map(render),
        computed.torsion_coefficients.as_ref().map(render),
    );
    let surface = computed.dimension == Some(2) && outcome.is_manifold();
    if surface {
        compare("genus", stored.genus.map(|g| g.to_string()), computed.genus.map(|g| g.to_string()));
        let names_matter = stored.name.as_deref().is_some_and(is_recognized_surface_name)
            || computed.name.as_deref().is_some_and(is_recognized_surface_name);
        if names_matter {
            compare("name", Some(stored.name.clone().unwrap_or_default()), computed.name.clone());
        }
    }
    if outcome.is_manifold() {
        compare("orientable", stored.orientable.map(|o| o.to_string()), computed.orientable.map(|o| o.to_string()));
    }

    let name_consistent = match (computed.dimension, stored.name.as_deref()) {
        (Some(3), Some(name)) => expected_3d_homology(name).map(|(betti, torsion)| {
            computed.betti_numbers.as_ref() == Some(&betti)
                && computed
                    .torsion_coefficients
                    .as_ref()
                    .is_some_and(|t| t.iter().map(String::as_str).eq(torsion.iter().copied()))
        }),
        _ => None,
    };
    RecordCheck { index, id: stored.id.clone(), mismatches, name_consistent }
}

/// Recomputes and compares every record.
pub fn verify_labels(records: &[DatasetRecord]) -> VerifyReport {
    let checks: Vec<RecordCheck> = records.par_iter().enumerate().map(|(i, r)| check_record(i, r)).collect();
    let mut summary = VerifySummary { records: records.len(), ..Default::default() };
    let mut kept = Vec::new();
    for c in checks {
        if !c.mismatches.is_empty() {
            summary.records_with_mismatch += 1;
        }
        for m in &c.mismatches {
            *summary.mismatches_by_field.entry(m.field.clone()).or_default() += 1;
        }
        if c.name_consistent == Some(false) {
            summary.inconsistent_3d_names += 1;
        }
        if !c.mismatches.is_empty() || c.name_consistent == Some(false) {
            kept.push(c);
        }
    }
    VerifyReport { summary, records: kept }
}
