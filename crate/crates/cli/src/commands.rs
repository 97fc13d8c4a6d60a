use std::path::Path;

use anyhow::{Context, Result};
use mantra_core::adjacency::{make_features_batch, write_features};
use mantra_core::complex::SimplicialComplex;
use mantra_core::dataset::{compute_labels_batch, label_distribution, stratified_split, verify_labels, SplitError};
use mantra_core::formats::{
    parse_lexicographical, read_dataset, records_from_lex, write_dataset, DatasetRecord,
};
use mantra_core::manifold::is_combinatorial_manifold;
use mantra_core::subdivision::barycentric_subdivision;
use rayon::prelude::*;

use crate::{fetch, Command, InputFormat, Output, TableFormat, UsageError};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn ensure_writable(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(usage(format!("{} exists; pass --force to overwrite", path.display())));
    }
    Ok(())
}

fn load(path: &Path) -> Result<Vec<DatasetRecord>> {
    let records = read_dataset(path).with_context(|| format!("reading {}", path.display()))?;
    eprintln!("read {} record(s) from {}", records.len(), path.display());
    Ok(records)
}

fn save(records: &[DatasetRecord], out: &Output) -> Result<()> {
    write_dataset(records, &out.output).with_context(|| format!("writing {}", out.output.display()))?;
    eprintln!("wrote {} record(s) to {}", records.len(), out.output.display());
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn complexes(records: &[DatasetRecord]) -> Result<Vec<SimplicialComplex>> {
    records
        .par_iter()
        .map(|r| r.complex().with_context(|| format!("record {:?}", r.id)))
        .collect()
}

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Convert { from, input, out } => {
            ensure_writable(&out.output, out.force)?;
            let records = match from {
                InputFormat::Lex => {
                    let text = std::fs::read_to_string(&input)
                        .with_context(|| format!("reading {}", input.display()))?;
                    let entries =
                        parse_lexicographical(&text).with_context(|| format!("parsing {}", input.display()))?;
                    records_from_lex(entries)?
                }
                InputFormat::Json => load(&input)?,
            };
            save(&records, &out)?;
            Ok(0)
        }

        Command::Labels { input, out } => {
            ensure_writable(&out.output, out.force)?;
            let records = load(&input)?;
            let outcomes = compute_labels_batch(&records);
            let mut failed = 0;
            for o in &outcomes {
                if let Some(reason) = &o.failure {
                    failed += 1;
                    eprintln!("warning: {}: {reason}", o.record.id);
                }
            }
            let labelled: Vec<DatasetRecord> = outcomes.into_iter().map(|o| o.record).collect();
            save(&labelled, &out)?;
            if failed > 0 {
                eprintln!("{failed} record(s) could not be fully labelled");
            }
            Ok(0)
        }

        Command::Verify { input, report, force } => {
            if let Some(r) = &report {
                ensure_writable(r, force)?;
            }
            let records = load(&input)?;
            let rep = verify_labels(&records);
            print!("{}", rep.to_markdown());
            if let Some(path) = report {
                let text = match path.extension().and_then(|e| e.to_str()) {
                    Some("md") => rep.to_markdown(),
                    Some("json") => serde_json::to_string_pretty(&rep)? + "\n",
                    _ => rep.to_csv(),
                };
                write_text(&path, &text)?;
            }
            eprintln!(
                "{} of {} record(s) have mismatches",
                rep.summary.records_with_mismatch, rep.summary.records
            );
            Ok(if rep.is_clean() { 0 } else { 1 })
        }

        Command::Check { input, all } => {
            let records = load(&input)?;
            let ks = complexes(&records)?;
            let reports: Vec<_> = ks.par_iter().map(is_combinatorial_manifold).collect();
            let mut bad = 0;
            println!("id,dimension,manifold,witnesses");
            for (r, rep) in records.iter().zip(reports) {
                let (dim, ok, witnesses) = match rep {
                    Ok(rep) => (
                        rep.dimension.to_string(),
                        rep.is_manifold,
                        rep.witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" "),
                    ),
                    Err(e) => (r.dimension_or_inferred().map_or("-".into(), |d| d.to_string()), false, e.to_string()),
                };
                if !ok {
                    bad += 1;
                }
                if all || !ok {
                    println!("{},{dim},{ok},\"{}\"", r.id, witnesses.replace('"', "\"\""));
                }
            }
            eprintln!("{bad} of {} record(s) are not closed combinatorial manifolds", records.len());
            Ok(if bad == 0 { 0 } else { 1 })
        }

        Command::Subdivide { input, iterations, out } => {
            ensure_writable(&out.output, out.force)?;
            let records = load(&input)?;
            let subdivided: Vec<DatasetRecord> = records
                .par_iter()
                .map(|r| -> Result<DatasetRecord> {
                    let mut k = r.complex().with_context(|| format!("record {:?}", r.id))?;
                    for _ in 0..iterations {
                        k = barycentric_subdivision(&k).0;
                    }
                    let mut out = r.clone();
                    out.triangulation = k.facet_lists();
                    out.n_vertices = Some(k.n_vertices());
                    out.dimension = k.dim();
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            save(&subdivided, &out)?;
            Ok(0)
        }

        Command::Split { input, seed, ratios, stratify_by, out } => {
            ensure_writable(&out.output, out.force)?;
            let records = load(&input)?;
            let split = stratified_split(&records, seed, ratios, &stratify_by).map_err(|e| match e {
                SplitError::Key(mantra_core::dataset::KeyError::UnknownKey(_)) | SplitError::BadRatios(_) => {
                    usage(e.to_string())
                }
                other => anyhow::Error::new(other),
            })?;
            for w in &split.warnings {
                eprintln!("warning: {w}");
            }
            write_text(&out.output, &split.to_json())?;
            let [a, b, c] = split.counts();
            eprintln!("train {a}, validation {b}, test {c} across {} strata", split.strata.len());
            Ok(0)
        }

        Command::Stats { input, key, format } => {
            let records = load(&input)?;
            for (i, k) in key.iter().enumerate() {
                let h = label_distribution(&records, k).map_err(|e| match e {
                    mantra_core::dataset::KeyError::UnknownKey(_) => usage(e.to_string()),
                    other => anyhow::Error::new(other),
                })?;
                if i > 0 && format == TableFormat::Md {
                    println!();
                }
                match format {
                    TableFormat::Md => print!("{}", h.to_markdown()),
                    TableFormat::Csv if i == 0 => print!("{}", h.to_csv()),
                    TableFormat::Csv => print!("{}", h.to_csv().split_once('\n').map_or("", |(_, rest)| rest)),
                }
            }
            Ok(0)
        }

        Command::Features { input, kind, seed, output, force } => {
            if kind.is_random() && seed.is_none() {
                return Err(usage(format!("--kind {kind} needs --seed")));
            }
            if !force && output.read_dir().is_ok_and(|mut d| d.next().is_some()) {
                return Err(usage(format!("{} is not empty; pass --force to write into it", output.display())));
            }
            let records = load(&input)?;
            let ks = complexes(&records)?;
            let items: Vec<(&str, &SimplicialComplex)> = records.iter().map(|r| r.id.as_str()).zip(&ks).collect();
            let feats = make_features_batch(&items, kind, seed)?;
            let rows: Vec<_> = items.iter().zip(&feats).map(|((id, k), f)| (*id, *k, f)).collect();
            let sidecar = write_features(&output, &rows).with_context(|| format!("writing {}", output.display()))?;
            eprintln!("wrote {} to {}", sidecar.files.join(", "), output.display());
            Ok(0)
        }

        Command::Fetch { version, dest, manifest, force } => {
            fetch::run(&version, dest, manifest.as_deref(), force)?;
            Ok(0)
        }
    }
}
