use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Map, Value};

use fiberscope::fiber::{parse_rational, Chart, LocalAnalyzer, Precision};

use crate::{document, load_cover, Failure};

#[derive(Debug, Deserialize)]
struct Manifest {
    schema: u32,
    #[serde(default)]
    rows: Vec<Row>,
}

#[derive(Debug, Deserialize)]
struct Row {
    cover: PathBuf,
    p: u64,
    t: Vec<String>,
    fixture: PathBuf,
    #[serde(default)]
    chart: Option<String>,
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Runs every row of the manifest. Each point is factored by the oracle and
/// compared with the fixture, and the prediction is compared with the
/// oracle. Paths are relative to the manifest.
pub fn run(manifest_path: &Path, write_fixtures: bool) -> Result<Value, Failure> {
    let manifest: Manifest = serde_json::from_value(read_json(manifest_path)?)
        .map_err(|e| Failure::Config(format!("{}: {e}", manifest_path.display())))?;
    if manifest.schema != 1 {
        return Err(Failure::Config(format!("unsupported manifest schema {}", manifest.schema)));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut rows_out = Vec::new();
    let mut failures = 0usize;
    let mut points = 0usize;
    for row in &manifest.rows {
        let chart = match row.chart.as_deref() {
            None | Some("affine") => Chart::Affine,
            Some("infinity") => Chart::Infinity,
            Some(other) => return Err(Failure::Config(format!("unknown chart {other:?}"))),
        };
        let spec = load_cover(&base.join(&row.cover))?;
        let analyzer = LocalAnalyzer::new(&spec, row.p, chart)?;
        let fixture_path = base.join(&row.fixture);
        let expected = if write_fixtures {
            None
        } else if fixture_path.exists() {
            Some(read_json(&fixture_path)?)
        } else {
            return Err(Failure::Precondition(format!("missing fixture {}", fixture_path.display())));
        };

        let mut fibers = Map::new();
        let mut problems = Vec::new();
        for t_text in &row.t {
            let t = parse_rational(t_text).ok_or_else(|| Failure::Config(format!("cannot parse t = {t_text:?}")))?;
            let agreement = analyzer.agreement(&t, Precision::Auto)?;
            let got = agreement.oracle.to_json();
            if !agreement.agree {
                problems.push(format!("t = {t}: prediction disagrees: {}", agreement.differences.join("; ")));
            }
            if let Some(expected) = &expected {
                match expected["fibers"].get(t.to_string()) {
                    Some(want) if *want == got => {}
                    Some(_) => problems.push(format!("t = {t}: oracle differs from fixture")),
                    None => problems.push(format!("t = {t}: not in fixture")),
                }
            }
            fibers.insert(t.to_string(), got);
            points += 1;
        }
        if write_fixtures {
            let body = document(json!({
                "cover": row.cover.display().to_string(),
                "p": row.p,
                "fibers": Value::Object(fibers),
            }));
            let text = serde_json::to_string_pretty(&body).expect("serializable") + "\n";
            if let Some(dir) = fixture_path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&fixture_path, text).map_err(|e| Failure::Config(format!("{}: {e}", fixture_path.display())))?;
        }
        failures += problems.len();
        rows_out.push(json!({
            "cover": row.cover.display().to_string(),
            "p": row.p,
            "points": row.t.len(),
            "ok": problems.is_empty(),
            "problems": problems,
        }));
    }
    let body = document(json!({
        "rows": rows_out,
        "points": points,
        "failures": failures,
        "ok": failures == 0,
    }));
    if failures > 0 {
        Err(Failure::Mismatch(body))
    } else {
        Ok(body)
    }
}
