#![allow(dead_code)]

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::Deserialize;

use fiberscope::cover::CoverSpec;
use fiberscope::fiber::{parse_rational, Chart};

#[derive(Debug, Deserialize)]
struct Manifest {
    rows: Vec<Row>,
}

#[derive(Debug, Deserialize)]
struct Row {
    cover: PathBuf,
    p: u64,
    t: Vec<String>,
    #[serde(default)]
    chart: Option<String>,
}

/// One manifest row with its cover loaded.
pub struct CorpusRow {
    pub name: String,
    pub cover: CoverSpec,
    pub p: u64,
    pub chart: Chart,
    pub points: Vec<BigRational>,
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/corpus")
}

pub fn load_corpus() -> Vec<CorpusRow> {
    let dir = corpus_dir();
    let manifest: Manifest =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    manifest
        .rows
        .into_iter()
        .map(|row| {
            let text = std::fs::read_to_string(dir.join(&row.cover)).unwrap();
            let chart = match row.chart.as_deref() {
                Some("infinity") => Chart::Infinity,
                _ => Chart::Affine,
            };
            CorpusRow {
                name: row.cover.file_stem().unwrap().to_string_lossy().into_owned(),
                cover: CoverSpec::from_json(&text).unwrap(),
                p: row.p,
                chart,
                points: row.t.iter().map(|t| parse_rational(t).unwrap()).collect(),
            }
        })
        .collect()
}

/// `m(z)^e - t` with `m` the monic irreducible of degree `f` over `F_p`
/// given by `z` or `z^2 - n`, `n` the least non-square.
pub fn witness_cover(e: u32, f: u32, p: u64) -> CoverSpec {
    let m: Vec<i64> = match f {
        1 => vec![0, 1],
        2 => {
            let n = (2..p).find(|&n| (1..p).all(|x| x * x % p != n)).unwrap();
            vec![-(n as i64), 0, 1]
        }
        _ => panic!("witness covers have f <= 2"),
    };
    let mut power = vec![1i64];
    for _ in 0..e {
        let mut next = vec![0i64; power.len() + m.len() - 1];
        for (i, a) in power.iter().enumerate() {
            for (j, b) in m.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        power = next;
    }
    let rows: Vec<Vec<i64>> =
        power.iter().enumerate().map(|(i, &c)| if i == 0 { vec![c, -1] } else { vec![c] }).collect();
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    CoverSpec::from_rows(&refs).unwrap()
}
