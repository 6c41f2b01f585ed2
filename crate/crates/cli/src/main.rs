mod corpus;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fiberscope::cover::{bad_primes, check_good_reduction, CoverError, CoverSpec};
use fiberscope::fiber::{parse_rational, Chart, FiberError, LocalAnalyzer, Precision};
use fiberscope::finite::{
    chebotarev_compare, class_proportions, cycle_census, default_tolerance_constant, double_cosets,
    etale_from_frobenius, random_double_coset_check, transposition_check, FiniteError, GroupKind, Permutation,
    PermutationGroup,
};
use fiberscope::heights::{self, HeightError};
use fiberscope::padic::FqField;
use fiberscope::tame::{
    classify_binomial, count_classes, metacyclic_conjugate, proportion_realizable, realizability,
    realized_class_count, MetacyclicGroup, TameError,
};

/// Fibers of covers of the projective line over p-adic fields.
#[derive(Parser, Debug)]
#[command(name = "fiberscope", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predict (or factor) the fiber over t at p.
    Fiber {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        p: u64,
        /// Rational point such as 5, -3 or 7/2.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Fixed p-adic precision; automatic escalation when omitted.
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, value_enum, default_value_t = ChartArg::Affine)]
        chart: ChartArg,
        #[arg(long, value_enum, default_value_t = FiberMode::Predict)]
        mode: FiberMode,
    },
    /// Tame classes near a branch point (with --tbar), or the cycle-type
    /// census over F_q (without).
    Census {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        tbar: Option<u64>,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = ChartArg::Affine)]
        chart: ChartArg,
        /// Degree of the residue field extension for the cycle census.
        #[arg(long, default_value_t = 1)]
        f_deg: u32,
        /// Run the cycle census even at a bad prime.
        #[arg(long)]
        allow_bad: bool,
        /// Candidate monodromy group, by name (S3) or generators.
        #[arg(long)]
        group: Option<String>,
        /// Tolerance constant C in C / sqrt(q).
        #[arg(long)]
        constant: Option<f64>,
        /// Genus estimate used for the default tolerance constant.
        #[arg(long)]
        genus_hat: Option<u64>,
    },
    /// Good-reduction report at p.
    Check {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Primes of bad reduction up to a bound, plus forced ones beyond it.
    Badprimes {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        bound: u64,
    },
    /// Permutation-group operations.
    Group {
        #[arg(long, value_enum)]
        op: GroupOp,
        /// A name (S4, A4, D5, C6), a JSON list of 1-based image arrays, or
        /// cycle notations separated by `;`.
        #[arg(long)]
        generators: Option<String>,
        /// Degree, needed when generators are in cycle notation.
        #[arg(long)]
        degree: Option<usize>,
        /// Element in cycle notation, e.g. "(1 2)(3 4)".
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[arg(long, default_value_t = 7)]
        max_degree: usize,
    },
    /// Points of bounded height modulo m.
    Heights {
        #[arg(long, value_enum)]
        op: HeightOp,
        #[arg(long)]
        m: u64,
        #[arg(long = "N")]
        n: Option<u64>,
        /// Last modulus for a threshold sweep over m..=to.
        #[arg(long)]
        to: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Counting and comparing tame extension classes.
    Tame {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        #[arg(long)]
        e: u64,
        /// Index of a unit in F_{p^f}; reports the class of z^e - u p.
        #[arg(long)]
        unit: Option<u64>,
        /// Two unit indices to test for conjugacy in the metacyclic group.
        #[arg(long, num_args = 2)]
        conjugate: Option<Vec<u64>>,
    },
    /// Run a manifest of covers, primes and points against fixtures.
    Corpus {
        #[arg(long)]
        manifest: PathBuf,
        /// Regenerate the fixture files from the oracle.
        #[arg(long)]
        write_fixtures: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChartArg {
    Affine,
    Infinity,
}

impl From<ChartArg> for Chart {
    fn from(c: ChartArg) -> Chart {
        match c {
            ChartArg::Affine => Chart::Affine,
            ChartArg::Infinity => Chart::Infinity,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FiberMode {
    Predict,
    Oracle,
    Compare,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupOp {
    DoubleCosets,
    Etale,
    Transpositions,
    Proportions,
    RandomCheck,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HeightOp {
    Threshold,
    Inject,
    Equidist,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

/// A failed run and its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Corpus mismatch (1), with the report to print.
    Mismatch(Value),
    /// Precondition failure (2).
    Precondition(String),
    /// Precision exhausted (3).
    Precision(String),
    /// Invalid configuration or input (4).
    Config(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Precision(_) => 3,
            Failure::Config(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Mismatch(_) => "mismatch",
            Failure::Precondition(_) => "precondition",
            Failure::Precision(_) => "precision",
            Failure::Config(_) => "config",
        }
    }
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<FiberError> for Failure {
    fn from(e: FiberError) -> Self {
        match e {
            FiberError::Cover(c) => c.into(),
            e if e.is_precision() => Failure::Precision(e.to_string()),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<FiniteError> for Failure {
    fn from(e: FiniteError) -> Self {
        match e {
            FiniteError::NotPermutation(_)
            | FiniteError::DegreeMismatch { .. }
            | FiniteError::NotTransposition(_)
            | FiniteError::Cover(_)
            | FiniteError::Field(_) => Failure::Config(e.to_string()),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<HeightError> for Failure {
    fn from(e: HeightError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<TameError> for Failure {
    fn from(e: TameError) -> Self {
        match e {
            TameError::Field(_) => Failure::Config(e.to_string()),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

/// Successful output: a JSON document or CSV text.
pub enum Output {
    Json(Value),
    Csv(String),
}

pub fn load_cover(path: &Path) -> Result<CoverSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(CoverSpec::from_json(&text)?)
}

pub fn document(mut body: Value) -> Value {
    body["schema"] = json!(1);
    body
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Fiber { cover, p, t, precision, chart, mode } => {
            let spec = load_cover(&cover)?;
            let t = parse_rational(&t).ok_or_else(|| Failure::Config(format!("cannot parse t = {t:?}")))?;
            let analyzer = LocalAnalyzer::new(&spec, p, chart.into())?;
            let precision = precision.map_or(Precision::Auto, Precision::Fixed);
            let mut body = json!({
                "cover": cover.display().to_string(),
                "p": p,
                "t": t.to_string(),
                "chart": format!("{chart:?}").to_lowercase(),
            });
            match mode {
                FiberMode::Predict => {
                    let (d, used) = analyzer.predict(&t, precision)?;
                    body["descriptor"] = d.to_json();
                    body["precision"] = json!(used);
                }
                FiberMode::Oracle => {
                    let (d, used) = analyzer.oracle(&t, precision)?;
                    body["descriptor"] = d.to_json();
                    body["precision"] = json!(used);
                }
                FiberMode::Compare => {
                    let a = analyzer.agreement(&t, precision)?;
                    body["agree"] = json!(a.agree);
                    body["differences"] = json!(a.differences);
                    body["predicted"] = a.predicted.to_json();
                    body["oracle"] = a.oracle.to_json();
                    body["precision"] = json!(a.precision);
                }
            }
            if !analyzer.cover().warnings().is_empty() {
                body["warnings"] = json!(analyzer.cover().warnings());
            }
            Ok(Output::Json(document(body)))
        }
        Command::Census { cover, p, tbar, depth, chart, f_deg, allow_bad, group, constant, genus_hat } => {
            let spec = load_cover(&cover)?;
            match tbar {
                Some(tbar) => {
                    let analyzer = LocalAnalyzer::new(&spec, p, chart.into())?;
                    let census = analyzer.measure_census(tbar, depth)?;
                    let realizable = analyzer.realizable_classes(tbar)?;
                    Ok(Output::Json(document(json!({
                        "cover": cover.display().to_string(),
                        "census": to_value(&census),
                        "realizable": to_value(&realizable),
                    }))))
                }
                None => {
                    let report = cycle_census(&spec, p, f_deg, allow_bad)?;
                    let mut body = json!({ "cover": cover.display().to_string(), "census": to_value(&report) });
                    if let Some(g) = group {
                        let group = parse_group(&g, Some(spec.degree()))?;
                        let mut warnings = Vec::new();
                        let c = match (constant, genus_hat) {
                            (Some(c), _) => c,
                            (None, Some(g)) => default_tolerance_constant(g, group.order()),
                            (None, None) => {
                                warnings.push("no --genus-hat given; default constant uses genus 0".to_string());
                                default_tolerance_constant(0, group.order())
                            }
                        };
                        body["chebotarev"] = to_value(&chebotarev_compare(&report, &group, c)?);
                        if !warnings.is_empty() {
                            body["warnings"] = json!(warnings);
                        }
                    }
                    Ok(Output::Json(document(body)))
                }
            }
        }
        Command::Check { cover, p } => {
            let spec = load_cover(&cover)?;
            let report = check_good_reduction(&spec, p)?;
            Ok(Output::Json(document(json!({ "cover": cover.display().to_string(), "report": to_value(&report) }))))
        }
        Command::Badprimes { cover, bound } => {
            let spec = load_cover(&cover)?;
            if bound < 2 {
                return Err(Failure::Config("bound must be at least 2".into()));
            }
            let report = bad_primes(&spec, bound)?;
            Ok(Output::Json(document(json!({ "cover": cover.display().to_string(), "report": to_value(&report) }))))
        }
        Command::Group { op, generators, degree, sigma, seed, cases, max_degree } => run_group(op, generators, degree, sigma, seed, cases, max_degree),
        Command::Heights { op, m, n, to, format } => run_heights(op, m, n, to, format),
        Command::Tame { p, f, e, unit, conjugate } => {
            let q = p.checked_pow(f).ok_or_else(|| Failure::Config("p^f overflows".into()))?;
            let field = FqField::new(p, f).map_err(|e| Failure::Config(e.to_string()))?;
            let mut body = json!({
                "p": p,
                "f": f,
                "e": e,
                "class_count": count_classes(p, f, e)?,
                "realized_count": realized_class_count(e, f, p),
                "all_realized": realizability(e, f, p),
                "proportion_realized": proportion_realizable(e, f, p).to_string(),
            });
            if let Some(u) = unit {
                if u == 0 || u >= q {
                    return Err(Failure::Config(format!("unit index must lie in [1, {q})")));
                }
                body["class"] = to_value(&classify_binomial(e, &field.element(u))?);
            }
            if let Some(ij) = conjugate {
                let group = MetacyclicGroup::new(e, q)?;
                body["conjugate"] = json!(metacyclic_conjugate(&group, ij[0], ij[1])?);
            }
            Ok(Output::Json(document(body)))
        }
        Command::Corpus { manifest, write_fixtures } => corpus::run(&manifest, write_fixtures).map(Output::Json),
    }
}

/// A named group, JSON image arrays, or `;`-separated cycle notations.
fn parse_group(text: &str, degree: Option<usize>) -> Result<PermutationGroup, Failure> {
    if let Some((kind, d)) = GroupKind::parse(text) {
        return Ok(kind.build(d)?);
    }
    let gens = parse_generators(text, degree)?;
    let d = gens.first().map(|g| g.degree()).or(degree).ok_or_else(|| Failure::Config("empty generator list needs --degree".into()))?;
    Ok(PermutationGroup::generate(d, gens)?)
}

fn parse_generators(text: &str, degree: Option<usize>) -> Result<Vec<Permutation>, Failure> {
    let text = text.trim();
    if text.starts_with('[') {
        let arrays: Vec<Vec<usize>> =
            serde_json::from_str(text).map_err(|e| Failure::Config(format!("generators: {e}")))?;
        return Ok(arrays.iter().map(|a| Permutation::from_one_based(a)).collect::<Result<_, _>>()?);
    }
    let d = degree.ok_or_else(|| Failure::Config("cycle-notation generators need --degree".into()))?;
    Ok(text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Permutation::from_cycles(s, d))
        .collect::<Result<_, _>>()?)
}

fn run_group(
    op: GroupOp,
    generators: Option<String>,
    degree: Option<usize>,
    sigma: Option<String>,
    seed: u64,
    cases: usize,
    max_degree: usize,
) -> Result<Output, Failure> {
    let need = |x: Option<String>, name: &str| x.ok_or_else(|| Failure::Config(format!("--{name} is required")));
    let body = match op {
        GroupOp::RandomCheck => {
            let report = random_double_coset_check(seed, cases, max_degree)?;
            let ok = report.mismatches.is_empty();
            let body = to_value(&report);
            if !ok {
                return Err(Failure::Mismatch(document(body)));
            }
            body
        }
        GroupOp::Transpositions => {
            let gens = parse_generators(&need(generators, "generators")?, degree)?;
            let d = degree.or_else(|| gens.first().map(|g| g.degree())).ok_or_else(|| Failure::Config("--degree is required".into()))?;
            to_value(&transposition_check(&gens, d)?)
        }
        GroupOp::Proportions => {
            let group = parse_group(&need(generators, "generators")?, degree)?;
            let props: serde_json::Map<String, Value> =
                class_proportions(&group).iter().map(|(k, v)| (k.to_string(), json!(v.to_string()))).collect();
            json!({ "order": group.order(), "proportions": props })
        }
        GroupOp::DoubleCosets | GroupOp::Etale => {
            let group = parse_group(&need(generators, "generators")?, degree)?;
            let sigma = Permutation::from_cycles(&need(sigma, "sigma")?, group.degree())?;
            if matches!(op, GroupOp::Etale) {
                json!({ "sigma": sigma.to_string(), "degrees": etale_from_frobenius(&sigma, &group)? })
            } else {
                let report = double_cosets(&group, &sigma)?;
                let mut v = to_value(&report);
                v["sigma_cycles"] = json!(sigma.to_string());
                v["blocks"] = to_value(&report.blocks());
                v
            }
        }
    };
    Ok(Output::Json(document(body)))
}

fn run_heights(op: HeightOp, m: u64, n: Option<u64>, to: Option<u64>, format: Format) -> Result<Output, Failure> {
    let need_n = || n.ok_or_else(|| Failure::Config("--N is required".into()));
    match op {
        HeightOp::Threshold => {
            let last = to.unwrap_or(m);
            let reports = (m..=last).map(heights::surjectivity_threshold).collect::<Result<Vec<_>, _>>()?;
            if format == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["m", "classes", "threshold", "bound", "within_bound"]).map_err(csv_error)?;
                for r in &reports {
                    w.write_record([r.m, r.classes, r.threshold, r.bound].iter().map(|x| x.to_string()).chain([r.within_bound.to_string()]))
                        .map_err(csv_error)?;
                }
                return csv_output(w);
            }
            Ok(Output::Json(document(json!({ "thresholds": to_value(&reports) }))))
        }
        HeightOp::Inject => {
            let r = heights::injectivity_check(m, need_n()?)?;
            if format == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["m", "N", "injective", "below_bound", "collision"]).map_err(csv_error)?;
                let collision = r.collision.map(|(x, y)| format!("{x} {y}")).unwrap_or_default();
                w.write_record([r.m.to_string(), r.n.to_string(), r.injective.to_string(), r.below_bound.to_string(), collision])
                    .map_err(csv_error)?;
                return csv_output(w);
            }
            Ok(Output::Json(document(to_value(&r))))
        }
        HeightOp::Equidist => {
            let n = need_n()?;
            let r = heights::equidistribution_test(m, n)?;
            if format == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["u", "v", "count", "raw_count", "main_term", "residual"]).map_err(csv_error)?;
                for row in &r.rows {
                    w.write_record([
                        row.class.u.to_string(),
                        row.class.v.to_string(),
                        row.count.to_string(),
                        row.raw_count.to_string(),
                        format!("{:.3}", r.main_term),
                        format!("{:.3}", row.residual),
                    ])
                    .map_err(csv_error)?;
                }
                return csv_output(w);
            }
            let mut body = to_value(&r);
            body["constant"] = json!(heights::EQUIDIST_CONSTANT);
            body["within_constant"] = json!(r.normalized <= heights::EQUIDIST_CONSTANT);
            Ok(Output::Json(document(body)))
        }
    }
}

fn csv_error(e: csv::Error) -> Failure {
    Failure::Config(e.to_string())
}

fn csv_output(w: csv::Writer<Vec<u8>>) -> Result<Output, Failure> {
    let bytes = w.into_inner().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(Output::Csv(String::from_utf8(bytes).expect("utf-8")))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Output::Json(v)) => {
            emit(&(serde_json::to_string_pretty(&v).expect("serializable") + "\n"));
            ExitCode::SUCCESS
        }
        Ok(Output::Csv(text)) => {
            emit(&text);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            let body = match &failure {
                Failure::Mismatch(v) => v.clone(),
                Failure::Precondition(m) | Failure::Precision(m) | Failure::Config(m) => {
                    eprintln!("error: {m}");
                    document(json!({ "error": { "kind": failure.kind(), "message": m } }))
                }
            };
            emit(&(serde_json::to_string_pretty(&body).expect("serializable") + "\n"));
            ExitCode::from(failure.code())
        }
    }
}
