use std::path::PathBuf;

use mantra_core::dataset::{compute_labels, verify_labels};
use mantra_core::formats::{
    parse_dataset, parse_lexicographical, read_dataset, records_from_lex, to_json_string, validate_record,
    write_dataset,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

const JSON_FIXTURES: [&str; 3] = ["two_spheres.json", "single_rp2.json", "mixed.json"];

#[test]
fn canonical_files_rewrite_byte_identically() {
    for name in JSON_FIXTURES {
        let bytes = std::fs::read(fixture(name)).unwrap();
        let recs = parse_dataset(&bytes).unwrap();
        assert_eq!(to_json_string(&recs).as_bytes(), &bytes[..], "{name}");
    }
}

#[test]
fn read_write_read_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    for name in JSON_FIXTURES {
        let recs = read_dataset(&fixture(name)).unwrap();
        for out in ["a.json", "a.json.gz"] {
            let path = dir.path().join(out);
            write_dataset(&recs, &path).unwrap();
            assert_eq!(read_dataset(&path).unwrap(), recs, "{name} via {out}");
        }
    }
}

#[test]
fn stored_labels_are_reproduced() {
    for name in JSON_FIXTURES {
        let recs = read_dataset(&fixture(name)).unwrap();
        assert!(recs.iter().all(|r| validate_record(r).is_clean()), "{name}");
        let report = verify_labels(&recs);
        assert!(report.is_clean(), "{name}: {report:?}");
        for r in &recs {
            let recomputed = compute_labels(r);
            assert!(recomputed.failure.is_none());
            assert_eq!(recomputed.record, *r);
        }
    }
}

#[test]
fn lex_to_json_matches_direct_parse() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["lex_d2_n6.txt", "mixed_lex_2_6.txt"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let direct = records_from_lex(parse_lexicographical(&text).unwrap()).unwrap();
        assert_eq!(direct.len(), 1);
        assert_eq!(direct[0].triangulation.len(), 8);
        let path = dir.path().join("x.json.gz");
        write_dataset(&direct, &path).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), direct);
    }
}

#[test]
fn lex_variants_are_equivalent() {
    let one_line = "manifold_2_6_1=[[1,2,3],[1,2,4],[1,3,5],[1,4,6],[1,5,6],[2,3,4],[3,4,5],[4,5,6]]";
    let wrapped = std::fs::read_to_string(fixture("mixed_lex_2_6.txt")).unwrap();
    assert_eq!(parse_lexicographical(one_line).unwrap(), parse_lexicographical(&wrapped).unwrap());
}
