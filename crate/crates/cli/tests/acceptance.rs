//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.
//!
//! The full-archive criterion reads `2_manifolds.json.gz` and
//! `3_manifolds.json.gz` from `$MANTRA_ARCHIVE_DIR`, or from
//! `<cache>/latest/` where `<cache>` is `$MANTRA_CACHE_DIR` or
//! `~/.cache/mantra` (the layout written by `mantra fetch`).

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mantra_core::complex::SimplicialComplex;
use mantra_core::dataset::{allocate, compute_labels, label_distribution, stratified_split, verify_labels, SplitRatios};
use mantra_core::formats::{
    parse_lexicographical, read_dataset, records_from_lex, to_json_string, write_dataset, DatasetRecord,
};
use mantra_core::homology::{boundary_matrix, homology_profile, IntegerMatrix};
use mantra_core::manifold::{coherent_orientation, is_combinatorial_manifold, orientability};
use mantra_core::rng::KeyedRng;
use mantra_core::samples;
use mantra_core::subdivision::barycentric_subdivision;
use num_rational::BigRational;
use num_traits::Zero;

// Pinned limits. All numeric comparisons are exact.
const GOLDEN_TIME: Duration = Duration::from_secs(1);
const PROPERTY_TIME: Duration = Duration::from_secs(60);
const SUBDIVISION_TIME: Duration = Duration::from_secs(120);
const PROPERTY_COMPLEXES: usize = 500;
const SUBDIVISION_SURFACES: usize = 100;
const SPLIT_FIXTURE_SIZE: usize = 1000;
/// Largest allowed |split size - ratio * stratum size|.
const SPLIT_TOLERANCE: f64 = 1.0;

const SURFACE_TOTAL: usize = 43_138;
const THREE_MANIFOLD_TOTAL: usize = 250_359;
const SURFACE_CENSUS: [(u64, usize); 7] =
    [(4, 1), (5, 1), (6, 3), (7, 9), (8, 43), (9, 655), (10, 42_426)];
const THREE_MANIFOLD_CENSUS: [(u64, usize); 7] =
    [(4, 0), (5, 1), (6, 2), (7, 5), (8, 39), (9, 1297), (10, 249_015)];
const SURFACE_BETTI_1: [(u64, usize); 7] =
    [(0, 1670), (1, 4655), (2, 14_146), (3, 13_694), (4, 7917), (5, 1022), (6, 34)];
const SURFACE_GENUS: [(u64, usize); 8] =
    [(0, 306), (1, 3593), (2, 5520), (3, 11_937), (4, 13_694), (5, 7052), (6, 1022), (7, 14)];
const SURFACE_BETTI_2_ZERO: usize = 39_718;
const THREE_MANIFOLD_H2_Z2: usize = 616;
const THREE_MANIFOLD_BETTI: [(&str, [(u64, usize); 2]); 3] = [
    ("betti_1", [(0, 249_225), (1, 1134)]),
    ("betti_2", [(0, 249_841), (1, 518)]),
    ("betti_3", [(0, 616), (1, 249_743)]),
];

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn within(label: &str, start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure!(t < limit, "{label} took {t:.2?}, limit {limit:?}");
    Ok(t)
}

fn bare(r: &DatasetRecord) -> DatasetRecord {
    DatasetRecord::new(r.id.clone(), r.triangulation.clone())
}

fn golden_records() -> Outcome {
    let start = Instant::now();
    let recs = read_dataset(&fixture("two_spheres.json")).map_err(|e| e.to_string())?;
    ensure!(recs.len() == 2, "expected 2 records, got {}", recs.len());
    for r in &recs {
        let out = compute_labels(&bare(r)).record;
        ensure!(out.betti_numbers == Some(vec![1, 0, 1]), "{}: betti {:?}", r.id, out.betti_numbers);
        ensure!(
            out.torsion_coefficients == Some(vec![String::new(); 3]),
            "{}: torsion {:?}",
            r.id,
            out.torsion_coefficients
        );
        ensure!(out.genus == Some(0), "{}: genus {:?}", r.id, out.genus);
        ensure!(out.orientable == Some(true), "{}: orientable {:?}", r.id, out.orientable);
        ensure!(out.name.as_deref() == Some("S^2"), "{}: name {:?}", r.id, out.name);
    }
    let t = within("golden records", start, GOLDEN_TIME)?;
    Ok(format!("2 records, {t:.2?}"))
}

fn padded_betti(k: &SimplicialComplex, len: usize) -> Vec<usize> {
    let mut b = homology_profile(k).betti;
    b.resize(len, 0);
    b
}

fn figure_suite() -> Outcome {
    let cases = [
        ("solid tetrahedron", samples::solid_tetrahedron(), vec![1, 0, 0, 0]),
        ("hollow tetrahedron", samples::tetrahedron_boundary(), vec![1, 0, 1]),
        ("tetrahedron graph", samples::tetrahedron_graph(), vec![1, 3, 0]),
        ("four points", samples::four_points(), vec![4, 0, 0]),
    ];
    for (name, k, expected) in cases {
        let got = padded_betti(&k, expected.len());
        ensure!(got == expected, "{name}: {got:?} != {expected:?}");
    }
    Ok("4 complexes".into())
}

fn rational_rank(m: &IntegerMatrix) -> usize {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| BigRational::from_integer(m[(i, j)].clone())).collect())
        .collect();
    let mut rank = 0;
    for c in 0..m.cols() {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(p, rank);
        let pivot = a[rank][c].clone();
        for r in rank + 1..a.len() {
            if !a[r][c].is_zero() {
                let f = a[r][c].clone() / pivot.clone();
                for j in c..m.cols() {
                    let sub = f.clone() * a[rank][j].clone();
                    a[r][j] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rational_betti(k: &SimplicialComplex) -> Vec<usize> {
    let Some(d) = k.dim() else { return vec![] };
    let f = k.f_vector();
    let ranks: Vec<usize> = (0..=d + 1)
        .map(|n| if n == 0 || n > d { 0 } else { rational_rank(&boundary_matrix(k, n).unwrap()) })
        .collect();
    (0..=d).map(|n| f[n] - ranks[n] - ranks[n + 1]).collect()
}

fn manifold_pool(seed: u64, per_base: usize) -> Vec<SimplicialComplex> {
    let mut rng = KeyedRng::new(seed, 0);
    let mut bases: Vec<SimplicialComplex> = samples::base_surfaces().into_iter().map(|(k, _, _)| k).collect();
    bases.extend([samples::boundary_4_simplex(), samples::s2_x_s1(), samples::s2_twist_s1()]);
    let mut out = bases.clone();
    for base in &bases {
        for _ in 0..per_base {
            let max_vertices = base.n_vertices().max(10);
            out.push(samples::randomize(base, &mut rng, 8, max_vertices));
        }
    }
    out
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = KeyedRng::new(20_240_601, 3);
    let mut complexes: Vec<SimplicialComplex> =
        (0..PROPERTY_COMPLEXES).map(|_| samples::random_complex(&mut rng, 8, 3)).collect();
    let manifolds = manifold_pool(11, 3);
    complexes.extend(manifolds.iter().cloned());

    for k in &complexes {
        let d = k.dim().unwrap();
        for n in 2..=d {
            let prod = &boundary_matrix(k, n - 1).unwrap() * &boundary_matrix(k, n).unwrap();
            ensure!(prod.is_zero(), "boundary of boundary nonzero in degree {n} on {:?}", k.facet_lists());
        }
        let profile = homology_profile(k);
        ensure!(
            profile.euler_characteristic() == k.euler_characteristic(),
            "Euler-Poincare fails on {:?}",
            k.facet_lists()
        );
        let oracle = rational_betti(k);
        ensure!(profile.betti == oracle, "betti {:?} vs rational {:?} on {:?}", profile.betti, oracle, k.facet_lists());

        let mut perm: Vec<u32> = (1..=64).collect();
        KeyedRng::new(k.f_vector().iter().sum::<usize>() as u64, 5).shuffle(&mut perm);
        let relabeled = k.relabel(|v| perm[v as usize - 1]);
        ensure!(homology_profile(&relabeled) == profile, "relabeling changed homology of {:?}", k.facet_lists());
    }

    let mut verified = 0;
    for k in &manifolds {
        if !is_combinatorial_manifold(k).unwrap().is_manifold {
            continue;
        }
        verified += 1;
        let top = *homology_profile(k).betti.last().unwrap();
        let orientable = orientability(k).unwrap();
        ensure!(orientable == (top == 1), "orientability {orientable} but top betti {top}");
        for start in 0..k.facets().len() {
            ensure!(
                coherent_orientation(k, start).is_some() == orientable,
                "orientation depends on start facet {start}"
            );
        }
    }
    ensure!(verified == manifolds.len(), "only {verified} of {} generated manifolds verified", manifolds.len());
    let t = within("property suite", start, PROPERTY_TIME)?;
    Ok(format!("{} complexes, {verified} manifolds, {t:.2?}", complexes.len()))
}

fn random_verified_surfaces(n: usize, seed: u64) -> Vec<SimplicialComplex> {
    let mut rng = KeyedRng::new(seed, 0);
    let bases = samples::base_surfaces();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (base, _, _) = &bases[rng.below(bases.len() as u64) as usize];
        let steps = rng.below(12) as usize;
        let k = samples::randomize(base, &mut rng, steps, 10.max(base.n_vertices()));
        if is_combinatorial_manifold(&k).unwrap().is_manifold {
            out.push(k);
        }
    }
    out
}

fn subdivision_suite() -> Outcome {
    let start = Instant::now();
    let surfaces = random_verified_surfaces(SUBDIVISION_SURFACES, 4242);
    for k in &surfaces {
        let (sd, _) = barycentric_subdivision(k);
        let (a, b) = (homology_profile(k), homology_profile(&sd));
        ensure!(a.betti == b.betti, "betti {:?} -> {:?}", a.betti, b.betti);
        ensure!(a.torsion == b.torsion, "torsion {:?} -> {:?}", a.torsion, b.torsion);
        ensure!(is_combinatorial_manifold(&sd).unwrap().is_manifold, "subdivision is not a manifold");
        ensure!(orientability(k).unwrap() == orientability(&sd).unwrap(), "orientability changed");
        ensure!(k.euler_characteristic() == sd.euler_characteristic(), "Euler characteristic changed");
        ensure!(sd.f_vector()[2] == 6 * k.f_vector()[2], "f2 {} -> {}", k.f_vector()[2], sd.f_vector()[2]);
    }
    let t = within("subdivision suite", start, SUBDIVISION_TIME)?;
    Ok(format!("{} surfaces, {t:.2?}", surfaces.len()))
}

fn identities() -> Outcome {
    let mut pool = manifold_pool(99, 4);
    pool.extend(random_verified_surfaces(50, 7));
    let (mut surfaces, mut threes) = (0, 0);
    for k in &pool {
        if !is_combinatorial_manifold(k).unwrap().is_manifold {
            continue;
        }
        let f = k.f_vector();
        let chi = k.euler_characteristic();
        match k.dim() {
            Some(2) => {
                surfaces += 1;
                ensure!(3 * f[2] == 2 * f[1], "3f2 != 2f1 for f = {f:?}");
                let orientable = orientability(k).unwrap();
                let b1 = homology_profile(k).betti[1] as i64;
                let genus = if orientable { b1 / 2 } else { b1 + 1 };
                let expected = if orientable { 2 - 2 * genus } else { 2 - genus };
                ensure!(chi == expected, "chi {chi} != {expected} (orientable {orientable}, genus {genus})");
            }
            Some(3) => {
                threes += 1;
                ensure!(4 * f[3] == 2 * f[2], "4f3 != 2f2 for f = {f:?}");
                ensure!(chi == 0, "chi {chi} on a 3-manifold");
            }
            d => return Err(format!("unexpected dimension {d:?}")),
        }
    }
    ensure!(surfaces > 0 && threes > 0, "empty pool");
    Ok(format!("{surfaces} surfaces, {threes} 3-manifolds"))
}

fn archive_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os("MANTRA_ARCHIVE_DIR") {
        return Some(PathBuf::from(d));
    }
    let cache = std::env::var_os("MANTRA_CACHE_DIR")
        .filter(|d| !d.is_empty())
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/mantra")))?;
    Some(cache.join("latest"))
}

fn histogram(records: &[DatasetRecord], key: &str) -> Result<BTreeMap<String, usize>, String> {
    let h = label_distribution(records, key).map_err(|e| e.to_string())?;
    Ok(h.buckets.into_iter().map(|b| (b.value, b.count)).collect())
}

fn expect_counts(
    what: &str,
    got: &BTreeMap<String, usize>,
    expected: &[(u64, usize)],
) -> Result<(), String> {
    for (value, count) in expected {
        let g = got.get(&value.to_string()).copied().unwrap_or(0);
        ensure!(g == *count, "{what} = {value}: {g} != {count}");
    }
    Ok(())
}

fn full_archives() -> Outcome {
    let start = Instant::now();
    let dir = archive_dir().ok_or("no archive directory (set MANTRA_CACHE_DIR or MANTRA_ARCHIVE_DIR)")?;
    let two = dir.join("2_manifolds.json.gz");
    let three = dir.join("3_manifolds.json.gz");
    for p in [&two, &three] {
        ensure!(p.exists(), "{} not found; run `mantra fetch` first", p.display());
    }
    let surfaces = read_dataset(&two).map_err(|e| e.to_string())?;
    let threes = read_dataset(&three).map_err(|e| e.to_string())?;
    ensure!(surfaces.len() == SURFACE_TOTAL, "{} surface records", surfaces.len());
    ensure!(threes.len() == THREE_MANIFOLD_TOTAL, "{} 3-manifold records", threes.len());

    for (name, recs) in [("surfaces", &surfaces), ("3-manifolds", &threes)] {
        let rep = verify_labels(recs);
        ensure!(rep.is_clean(), "{name}: {} mismatching records {:?}", rep.summary.records_with_mismatch, rep.summary.mismatches_by_field);
    }
    expect_counts("surface n_vertices", &histogram(&surfaces, "n_vertices")?, &SURFACE_CENSUS)?;
    expect_counts("3-manifold n_vertices", &histogram(&threes, "n_vertices")?, &THREE_MANIFOLD_CENSUS)?;
    expect_counts("surface betti_1", &histogram(&surfaces, "betti_1")?, &SURFACE_BETTI_1)?;
    expect_counts("surface genus", &histogram(&surfaces, "genus")?, &SURFACE_GENUS)?;
    expect_counts("surface betti_2", &histogram(&surfaces, "betti_2")?, &[(0, SURFACE_BETTI_2_ZERO)])?;
    for (key, counts) in &THREE_MANIFOLD_BETTI {
        expect_counts(&format!("3-manifold {key}"), &histogram(&threes, key)?, counts)?;
    }
    let h2 = histogram(&threes, "torsion_2")?;
    let z2 = h2.get("Z_2").copied().unwrap_or(0);
    ensure!(z2 == THREE_MANIFOLD_H2_Z2, "3-manifold H2 torsion Z_2: {z2} != {THREE_MANIFOLD_H2_Z2}");
    Ok(format!("{} + {} records, {:.2?}", surfaces.len(), threes.len(), start.elapsed()))
}

fn synthetic_records(n: usize) -> Vec<DatasetRecord> {
    let strata = ["S^2", "T^2", "RP^2", "Klein bottle", ""];
    let mut rng = KeyedRng::new(1000, 1);
    (0..n)
        .map(|i| {
            let mut r = DatasetRecord::new(format!("synthetic_{i:04}"), vec![vec![1, 2, 3]]);
            // uneven strata sizes
            let s = (rng.below(15) as usize).min(rng.below(15) as usize) % strata.len();
            r.name = Some(strata[s].to_string());
            r
        })
        .collect()
}

fn split_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let recs = synthetic_records(SPLIT_FIXTURE_SIZE);
    let input = dir.path().join("synthetic.json.gz");
    write_dataset(&recs, &input).map_err(|e| e.to_string())?;

    let mut files = Vec::new();
    for (run, threads) in [(0, "1"), (1, "4")] {
        let out = dir.path().join(format!("split{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_mantra"))
            .args(["--threads", threads, "split", "--input"])
            .arg(&input)
            .args(["--seed", "42", "--ratios", "0.6,0.2,0.2", "--stratify-by", "name", "--output"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(status.status.success(), "split failed: {}", String::from_utf8_lossy(&status.stderr));
        files.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure!(files[0] == files[1], "two runs with seed 42 differ");

    let ratios = SplitRatios::default();
    let split = stratified_split(&recs, 42, ratios, "name").map_err(|e| e.to_string())?;
    let from_file: BTreeMap<String, String> = serde_json::from_slice(&files[0]).map_err(|e| e.to_string())?;
    ensure!(from_file.len() == recs.len(), "assignment covers {} of {} ids", from_file.len(), recs.len());
    for s in &split.strata {
        for (i, &count) in s.counts.iter().enumerate() {
            let target = s.size as f64 * ratios.0[i] as f64 / 1e6;
            ensure!(
                (count as f64 - target).abs() < SPLIT_TOLERANCE || s.size < 3,
                "stratum {}: split {i} has {count}, target {target}",
                s.value
            );
        }
        ensure!(s.size < 3 || s.counts == allocate(s.size, ratios), "stratum {} not largest remainder", s.value);
    }
    Ok(format!("{} strata over {} records", split.strata.len(), recs.len()))
}

fn format_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in ["lex_d2_n6.txt", "mixed_lex_2_6.txt"] {
        let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
        let direct =
            records_from_lex(parse_lexicographical(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let out = dir.path().join(format!("{name}.json.gz"));
        let status = Command::new(env!("CARGO_BIN_EXE_mantra"))
            .args(["convert", "--from", "lex", "--input"])
            .arg(fixture(name))
            .arg("--output")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(status.status.success(), "convert failed on {name}: {}", String::from_utf8_lossy(&status.stderr));
        let via_json = read_dataset(&out).map_err(|e| e.to_string())?;
        ensure!(via_json == direct, "{name}: JSON path differs from direct parse");
        ensure!(direct.len() == 1 && direct[0].triangulation.len() == 8, "{name}: expected one 8-facet entry");
    }
    let fixtures = ["two_spheres.json", "single_rp2.json", "mixed.json"];
    for name in fixtures {
        let bytes = std::fs::read(fixture(name)).map_err(|e| e.to_string())?;
        let recs = read_dataset(&fixture(name)).map_err(|e| e.to_string())?;
        ensure!(to_json_string(&recs).as_bytes() == &bytes[..], "{name}: rewrite is not byte-identical");
        let out = dir.path().join(format!("{name}.gz"));
        write_dataset(&recs, &out).map_err(|e| e.to_string())?;
        let again = read_dataset(&out).map_err(|e| e.to_string())?;
        let key = |rs: &[DatasetRecord]| rs.iter().map(|r| (r.id.clone(), r.clone())).collect::<BTreeMap<_, _>>();
        ensure!(key(&again) == key(&recs), "{name}: round trip lost information");
    }
    Ok(format!("2 listings, {} JSON fixtures", fixtures.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "golden records", golden_records),
        (2, "figure suite", figure_suite),
        (3, "property suite", property_suite),
        (4, "subdivision suite", subdivision_suite),
        (5, "combinatorial identities", identities),
        (6, "full-archive verification", full_archives),
        (7, "split determinism", split_determinism),
        (8, "format round-trip", format_round_trip),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, f) in criteria {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {n} ({name}): PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL ({why})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
