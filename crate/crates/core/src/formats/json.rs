//! The gzip-compressed JSON record files (`2_manifolds.json.gz`, ...).
//!
//! Output reproduces the upstream pretty-printer byte for byte: two-space
//! indentation, one facet per line with no spaces inside the facet, other
//! arrays one element per line, ASCII-only string escapes and no trailing
//! newline.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde_json::{Map, Value};

use super::FormatError;
use crate::complex::{ComplexError, SimplicialComplex, VertexId};

/// Names allowed in the `name` field of surface records.
pub const SURFACE_NAMES: [&str; 5] = ["", "Klein bottle", "RP^2", "S^2", "T^2"];
/// Names allowed in the `name` field of 3-manifold records.
pub const THREE_MANIFOLD_NAMES: [&str; 3] = ["S^2 twist S^1", "S^2 x S^1", "S^3"];

/// One triangulation and its labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetRecord {
    pub id: String,
    pub triangulation: Vec<Vec<VertexId>>,
    pub dimension: Option<usize>,
    pub n_vertices: Option<usize>,
    pub betti_numbers: Option<Vec<u64>>,
    pub torsion_coefficients: Option<Vec<String>>,
    pub name: Option<String>,
    pub genus: Option<u32>,
    pub orientable: Option<bool>,
    /// Unknown fields, kept in input order and written after the known ones.
    pub extra: Map<String, Value>,
}

impl DatasetRecord {
    pub fn new(id: impl Into<String>, triangulation: Vec<Vec<VertexId>>) -> Self {
        DatasetRecord { id: id.into(), triangulation, ..Default::default() }
    }

    /// Facet dimension inferred from the triangulation (largest facet).
    pub fn inferred_dimension(&self) -> Option<usize> {
        self.triangulation.iter().map(Vec::len).max().and_then(|n| n.checked_sub(1))
    }

    pub fn dimension_or_inferred(&self) -> Option<usize> {
        self.dimension.or_else(|| self.inferred_dimension())
    }

    pub fn distinct_vertices(&self) -> usize {
        self.triangulation.iter().flatten().collect::<BTreeSet<_>>().len()
    }

    pub fn complex(&self) -> Result<SimplicialComplex, ComplexError> {
        SimplicialComplex::from_facets(
            self.triangulation.iter().map(|f| f.iter().map(|&v| i64::from(v)).collect::<Vec<_>>()),
        )
    }
}

fn violation(index: usize, field: &str, message: impl Into<String>) -> FormatError {
    FormatError::SchemaViolation { index, field: field.to_string(), message: message.into() }
}

fn as_uint(v: &Value) -> Option<u64> {
    v.as_u64()
}

fn record_from_value(index: usize, value: Value) -> Result<DatasetRecord, FormatError> {
    let Value::Object(mut obj) = value else {
        return Err(violation(index, "<record>", "record must be a JSON object"));
    };
    let mut take = |key: &str| obj.shift_remove(key);

    let id = match take("id") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(violation(index, "id", "must be a string")),
        None => return Err(violation(index, "id", "missing")),
    };

    let triangulation = match take("triangulation") {
        Some(Value::Array(facets)) => {
            let mut out = Vec::with_capacity(facets.len());
            for facet in facets {
                let Value::Array(vs) = facet else {
                    return Err(violation(index, "triangulation", "facets must be arrays"));
                };
                if vs.is_empty() {
                    return Err(violation(index, "triangulation", "empty facet"));
                }
                let mut f = Vec::with_capacity(vs.len());
                for v in vs {
                    match as_uint(&v).and_then(|v| VertexId::try_from(v).ok()) {
                        Some(v) if v > 0 => f.push(v),
                        _ => {
                            return Err(violation(index, "triangulation", format!("vertex {v} is not a positive integer")))
                        }
                    }
                }
                out.push(f);
            }
            out
        }
        Some(_) => return Err(violation(index, "triangulation", "must be an array of arrays")),
        None => return Err(violation(index, "triangulation", "missing")),
    };

    let opt_uint = |v: Option<Value>, field: &str| -> Result<Option<u64>, FormatError> {
        match v {
            None => Ok(None),
            Some(v) => as_uint(&v).map(Some).ok_or_else(|| violation(index, field, "must be a non-negative integer")),
        }
    };

    let dimension = opt_uint(take("dimension"), "dimension")?.map(|d| d as usize);
    let n_vertices = opt_uint(take("n_vertices"), "n_vertices")?.map(|d| d as usize);
    let genus = opt_uint(take("genus"), "genus")?
        .map(|g| u32::try_from(g).map_err(|_| violation(index, "genus", "out of range")))
        .transpose()?;

    let betti_numbers = match take("betti_numbers") {
        None => None,
        Some(Value::Array(vs)) => Some(
            vs.iter()
                .map(|v| as_uint(v).ok_or_else(|| violation(index, "betti_numbers", "entries must be non-negative integers")))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(_) => return Err(violation(index, "betti_numbers", "must be an array")),
    };
    let torsion_coefficients = match take("torsion_coefficients") {
        None => None,
        Some(Value::Array(vs)) => Some(
            vs.into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    _ => Err(violation(index, "torsion_coefficients", "entries must be strings")),
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(_) => return Err(violation(index, "torsion_coefficients", "must be an array")),
    };
    let name = match take("name") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(violation(index, "name", "must be a string")),
    };
    let orientable = match take("orientable") {
        None => None,
        Some(Value::Bool(b)) => Some(b),
        Some(_) => return Err(violation(index, "orientable", "must be a boolean")),
    };

    let mut record = DatasetRecord {
        id,
        triangulation,
        dimension,
        n_vertices,
        betti_numbers,
        torsion_coefficients,
        name,
        genus,
        orientable,
        extra: obj,
    };

    record.dimension = record.dimension_or_inferred();
    if let Some(d) = record.dimension {
        if let Some(b) = &record.betti_numbers {
            if b.len() != d + 1 {
                return Err(violation(index, "betti_numbers", format!("length {} != dimension + 1 = {}", b.len(), d + 1)));
            }
        }
        if let Some(t) = &record.torsion_coefficients {
            if t.len() != d + 1 {
                return Err(violation(
                    index,
                    "torsion_coefficients",
                    format!("length {} != dimension + 1 = {}", t.len(), d + 1),
                ));
            }
        }
    }
    Ok(record)
}

/// Parses a JSON array of records from raw bytes, gzip or plain.
pub fn parse_dataset(bytes: &[u8]) -> Result<Vec<DatasetRecord>, FormatError> {
    let text;
    let raw: &[u8] = if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut buf = Vec::new();
        GzDecoder::new(bytes).read_to_end(&mut buf)?;
        text = buf;
        &text
    } else {
        bytes
    };
    let value: Value = serde_json::from_slice(raw).map_err(|e| FormatError::MalformedJson(e.to_string()))?;
    let Value::Array(items) = value else {
        return Err(FormatError::MalformedJson("top level must be an array of records".into()));
    };
    items.into_iter().enumerate().map(|(i, v)| record_from_value(i, v)).collect()
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRecord>, FormatError> {
    let bytes = std::fs::read(path).map_err(|e| FormatError::io(path, e))?;
    parse_dataset(&bytes)
}

fn push_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{08}' => out.push_str("\\b"),
            '\u{0c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || (c as u32) > 0x7e => {
                let mut buf = [0u16; 2];
                for unit in c.encode_utf16(&mut buf) {
                    let _ = write!(out, "\\u{unit:04x}");
                }
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn push_indent(out: &mut String, level: usize) {
    out.push('\n');
    for _ in 0..level {
        out.push_str("  ");
    }
}

/// Generic value in `json.dumps(indent=2)` layout.
fn push_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            let _ = write!(out, "{n}");
        }
        Value::String(s) => push_string(out, s),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_indent(out, level + 1);
                push_value(out, item, level + 1);
            }
            push_indent(out, level);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_indent(out, level + 1);
                push_string(out, k);
                out.push_str(": ");
                push_value(out, item, level + 1);
            }
            push_indent(out, level);
            out.push('}');
        }
    }
}

fn push_list<T>(out: &mut String, items: &[T], level: usize, mut each: impl FnMut(&mut String, &T)) {
    if items.is_empty() {
        out.push_str("[]");
        return;
    }
    out.push('[');
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_indent(out, level + 1);
        each(out, item);
    }
    push_indent(out, level);
    out.push(']');
}

fn push_record(out: &mut String, r: &DatasetRecord) {
    const LEVEL: usize = 2;
    let mut first = true;
    let mut key = |out: &mut String, k: &str| {
        if !first {
            out.push(',');
        }
        first = false;
        push_indent(out, LEVEL);
        push_string(out, k);
        out.push_str(": ");
    };
    out.push('{');
    key(out, "id");
    push_string(out, &r.id);
    key(out, "triangulation");
    push_list(out, &r.triangulation, LEVEL, |out, facet| {
        out.push('[');
        for (i, v) in facet.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push(']');
    });
    if let Some(d) = r.dimension_or_inferred() {
        key(out, "dimension");
        let _ = write!(out, "{d}");
    }
    if let Some(n) = r.n_vertices {
        key(out, "n_vertices");
        let _ = write!(out, "{n}");
    }
    if let Some(b) = &r.betti_numbers {
        key(out, "betti_numbers");
        push_list(out, b, LEVEL, |out, v| {
            let _ = write!(out, "{v}");
        });
    }
    if let Some(t) = &r.torsion_coefficients {
        key(out, "torsion_coefficients");
        push_list(out, t, LEVEL, |out, s| push_string(out, s));
    }
    if let Some(n) = &r.name {
        key(out, "name");
        push_string(out, n);
    }
    if let Some(g) = r.genus {
        key(out, "genus");
        let _ = write!(out, "{g}");
    }
    if let Some(o) = r.orientable {
        key(out, "orientable");
        out.push_str(if o { "true" } else { "false" });
    }
    for (k, v) in &r.extra {
        key(out, k);
        push_value(out, v, LEVEL);
    }
    push_indent(out, 1);
    out.push('}');
}

/// Serializes records in the canonical layout.
pub fn to_json_string(records: &[DatasetRecord]) -> String {
    let mut out = String::new();
    if records.is_empty() {
        out.push_str("[]");
        return out;
    }
    out.push('[');
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_indent(&mut out, 1);
        push_record(&mut out, r);
    }
    out.push_str("\n]");
    out
}

/// Writes records; gzip-compressed when the path ends in `.gz`.
pub fn write_dataset(records: &[DatasetRecord], path: &Path) -> Result<(), FormatError> {
    let text = to_json_string(records);
    let file = std::fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
    let is_gz = path.extension().is_some_and(|e| e == "gz");
    let result = if is_gz {
        let mut enc = GzEncoder::new(std::io::BufWriter::new(file), Compression::default());
        enc.write_all(text.as_bytes()).and_then(|_| enc.finish()).and_then(|mut w| w.flush())
    } else {
        let mut w = std::io::BufWriter::new(file);
        w.write_all(text.as_bytes()).and_then(|_| w.flush())
    };
    result.map_err(|e| FormatError::io(path, e))
}

/// Everything wrong with one record; empty when clean.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub id: String,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn torsion_entry_ok(s: &str) -> bool {
    s.is_empty()
        || s.split(crate::homology::TORSION_SEPARATOR).all(|part| {
            part.strip_prefix("Z_").and_then(|q| q.parse::<u64>().ok()).is_some_and(|q| q >= 2)
        })
}

/// Checks record invariants without failing fast.
pub fn validate_record(r: &DatasetRecord) -> ValidationReport {
    let mut v = Vec::new();
    if r.id.is_empty() {
        v.push("empty id".to_string());
    }
    if r.triangulation.is_empty() {
        v.push("empty triangulation".to_string());
    }
    for (i, facet) in r.triangulation.iter().enumerate() {
        if facet.is_empty() {
            v.push(format!("facet {i} is empty"));
        }
        if facet.iter().any(|&x| x == 0) {
            v.push(format!("facet {i} has a non-positive vertex id"));
        }
        if facet.iter().collect::<BTreeSet<_>>().len() != facet.len() {
            v.push(format!("facet {i} repeats a vertex"));
        }
    }
    let sizes: BTreeSet<usize> = r.triangulation.iter().map(Vec::len).collect();
    if sizes.len() > 1 {
        v.push("facets have mixed sizes".to_string());
    }
    let inferred = r.inferred_dimension();
    if let (Some(d), Some(i)) = (r.dimension, inferred) {
        if d != i {
            v.push(format!("dimension mismatch: field {d}, facets imply {i}"));
        }
    }
    if let Some(n) = r.n_vertices {
        let actual = r.distinct_vertices();
        if n != actual {
            v.push(format!("n_vertices mismatch: field {n}, triangulation has {actual}"));
        }
    }
    let dim = r.dimension_or_inferred();
    if let (Some(d), Some(b)) = (dim, &r.betti_numbers) {
        if b.len() != d + 1 {
            v.push(format!("betti_numbers length {} != dimension + 1", b.len()));
        }
    }
    if let Some(t) = &r.torsion_coefficients {
        if let Some(d) = dim {
            if t.len() != d + 1 {
                v.push(format!("torsion_coefficients length {} != dimension + 1", t.len()));
            }
        }
        for s in t {
            if !torsion_entry_ok(s) {
                v.push(format!("torsion entry {s:?} is not of the form Z_q"));
            }
        }
    }
    if let Some(name) = &r.name {
        let allowed: &[&str] = match dim {
            Some(2) => &SURFACE_NAMES,
            Some(3) => &THREE_MANIFOLD_NAMES,
            _ => &[],
        };
        if !allowed.contains(&name.as_str()) {
            v.push(format!("name {name:?} not in allowed set"));
        }
    }
    if dim != Some(2) && (r.genus.is_some()) {
        v.push("genus is only defined for surfaces".to_string());
    }
    ValidationReport { id: r.id.clone(), violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B1: &str = include_str!("../../tests/fixtures/two_spheres.json");

    #[test]
    fn two_sphere_records() {
        let recs = parse_dataset(B1.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "manifold_2_4_1");
        assert_eq!(recs[0].betti_numbers, Some(vec![1, 0, 1]));
        assert_eq!(recs[1].triangulation.len(), 6);
        assert_eq!(recs[1].orientable, Some(true));
        assert!(recs.iter().all(|r| validate_record(r).is_clean()));
    }

    #[test]
    fn canonical_bytes_round_trip() {
        let recs = parse_dataset(B1.as_bytes()).unwrap();
        assert_eq!(to_json_string(&recs), B1);
    }

    #[test]
    fn empty_array() {
        assert!(parse_dataset(b"[]").unwrap().is_empty());
        assert_eq!(to_json_string(&[]), "[]");
    }

    #[test]
    fn schema_violations() {
        let bad = br#"[{"id":"a","triangulation":[[1,2,3]],"dimension":2,"betti_numbers":[1,0]}]"#;
        match parse_dataset(bad) {
            Err(FormatError::SchemaViolation { index: 0, field, .. }) => assert_eq!(field, "betti_numbers"),
            other => panic!("{other:?}"),
        }
        let bad = br#"[{"id":"a","triangulation":[[1,2,3]]},{"triangulation":[[1]]}]"#;
        assert!(matches!(parse_dataset(bad), Err(FormatError::SchemaViolation { index: 1, .. })));
        let bad = br#"[{"id":"a","triangulation":[[0,2,3]]}]"#;
        assert!(matches!(parse_dataset(bad), Err(FormatError::SchemaViolation { .. })));
        let bad = br#"[{"id":"a","triangulation":[[1,2.5]]}]"#;
        assert!(matches!(parse_dataset(bad), Err(FormatError::SchemaViolation { .. })));
        assert!(matches!(parse_dataset(b"[{"), Err(FormatError::MalformedJson(_))));
        assert!(matches!(parse_dataset(b"{}"), Err(FormatError::MalformedJson(_))));
    }

    #[test]
    fn validation_messages() {
        let mut r = parse_dataset(B1.as_bytes()).unwrap().remove(0);
        r.n_vertices = Some(5);
        let rep = validate_record(&r);
        assert_eq!(rep.violations.len(), 1);
        assert!(rep.violations[0].starts_with("n_vertices mismatch"));

        r.n_vertices = Some(4);
        r.name = Some("RP^3".into());
        let rep = validate_record(&r);
        assert_eq!(rep.violations, vec!["name \"RP^3\" not in allowed set".to_string()]);

        r.name = Some("S^2".into());
        r.torsion_coefficients = Some(vec!["".into(), "Z_1".into(), "".into()]);
        assert!(!validate_record(&r).is_clean());
        r.torsion_coefficients = Some(vec!["".into(), "Z_2 + Z_4".into(), "".into()]);
        assert!(validate_record(&r).is_clean());
    }

    #[test]
    fn extra_fields_survive() {
        let text = br#"[{"id":"a","triangulation":[[1,2,3]],"zeta":{"k":[1,2]},"alpha":"\u00e9"}]"#;
        let recs = parse_dataset(text).unwrap();
        assert_eq!(recs[0].dimension, Some(2));
        assert_eq!(recs[0].extra.keys().collect::<Vec<_>>(), ["zeta", "alpha"]);
        let out = to_json_string(&recs);
        assert!(out.contains("\"alpha\": \"\\u00e9\""));
        assert_eq!(parse_dataset(out.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn gzip_sniffing() {
        let dir = tempfile::tempdir().unwrap();
        let recs = parse_dataset(B1.as_bytes()).unwrap();
        let gz = dir.path().join("x.json.gz");
        let plain = dir.path().join("x.json");
        write_dataset(&recs, &gz).unwrap();
        write_dataset(&recs, &plain).unwrap();
        assert_eq!(std::fs::read(&gz).unwrap()[..2], [0x1f, 0x8b]);
        assert_eq!(read_dataset(&gz).unwrap(), read_dataset(&plain).unwrap());
        assert_eq!(std::fs::read_to_string(&plain).unwrap(), B1);
    }
}
