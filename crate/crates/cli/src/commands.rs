use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use periodpoly::gates::{compute_a_m, theorem_gate};
use periodpoly::lfunc::coeff_file::parse_coeff_file;
use periodpoly::lfunc::{
    central_recomputation, completed_lambda, verify_hypothesis, LFunctionData, SpecialValues, ALT_BALANCE,
};
use periodpoly::mp::DecimalPair;
use periodpoly::rv::{check_zeta_properties, resolve_closed_form, zeta_poly_from_values};
use periodpoly::specialpoly::{
    build_P_poly, build_Q_poly, build_p_poly, pq_scale_factor, pq_scaling_residual, reconstruction_residual,
    ApproximantSeries, PolySummary,
};
use periodpoly::sympow::{bundled_curve, bundled_eps, sym_lfunction_data, sym_root_number, CurveSpec};
use periodpoly::zerotools::{
    circle_report, count_disc_zeros, disc_transitions, poly_roots, trig_sign_changes, RootStatus,
};
use periodpoly::{Ball, Error, Precision, VERSION};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cache::{CacheKey, ValueCache};

#[derive(Debug, Parser)]
#[command(name = "periodpoly", version, about = "Zeros of special-value polynomials of odd-weight L-functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline for a curve's symmetric power or a coefficient file.
    Analyze(InputArgs),
    /// Completed values Λ(1), ..., Λ(w).
    Values(InputArgs),
    /// Zero counts c_{d,N} of the approximant in a disc.
    DiscTable(DiscArgs),
    /// The constants A_m.
    ATable(ATableArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Mantissa bits of the arithmetic (at least 64).
    #[arg(long, default_value_t = 128)]
    pub precision_bits: u32,
    /// Absolute error target for every special value.
    #[arg(long, default_value_t = 1e-20)]
    pub target_error: f64,
    /// Number of Dirichlet coefficients generated from a curve.
    #[arg(long, default_value_t = 20_000)]
    pub coeff_limit: usize,
    /// Disc radius for zero counting.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// JSON output (the default for analyze and values).
    #[arg(long, conflicts_with = "table")]
    pub json: bool,
    /// Plain-text table output (the default for disc-table and a-table).
    #[arg(long)]
    pub table: bool,
    /// Write the output here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Directory holding the special-value cache.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Curve file (`a1 a2 a3 a4 a6 N label`) or a bundled curve label.
    #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
    pub curve: Option<String>,
    /// Coefficient file.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Odd symmetric power; required with --curve, ignored with --coeffs.
    #[arg(long, num_args = 0..=1, default_missing_value = "0")]
    pub sym: Option<u32>,
    /// Root number, overriding the bundled table and the local rule.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<i8>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct DiscArgs {
    /// Even degree, 2 ≤ d ≤ 12.
    #[arg(long)]
    pub d: u32,
    #[arg(long, default_value_t = 1)]
    pub n_min: u64,
    #[arg(long, default_value_t = 800)]
    pub n_max: u64,
    /// Explicit conductors instead of a range, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ATableArgs {
    #[arg(long, default_value_t = 2)]
    pub m_min: u32,
    #[arg(long, default_value_t = 50)]
    pub m_max: u32,
    #[command(flatten)]
    pub common: Common,
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Ok = 0,
    VerificationFailure = 1,
    InputError = 2,
    CertificationFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Verification failures outrank certification failures.
    fn worst(self, other: ExitStatus) -> ExitStatus {
        let rank = |s: ExitStatus| match s {
            ExitStatus::Ok => 0,
            ExitStatus::CertificationFailure => 1,
            ExitStatus::VerificationFailure => 2,
            ExitStatus::InputError => 3,
        };
        if rank(other) > rank(self) { other } else { self }
    }
}

pub fn classify(e: &Error) -> ExitStatus {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::InvalidCurve(_)
        | Error::InvalidData(_)
        | Error::InvalidPrecision(_)
        | Error::MissingSpecialValue(_)
        | Error::PoleOfGamma { .. }
        | Error::OutsideConvergence(_)
        | Error::CountingBound { .. } => ExitStatus::InputError,
        Error::DataError(_) | Error::Deflation(_) | Error::ConventionMismatch(_) => ExitStatus::VerificationFailure,
        Error::InsufficientCoefficients { .. }
        | Error::NonconvergentQuadrature(_)
        | Error::RootNonConvergence { .. }
        | Error::CannotCertify(_)
        | Error::TailBudget(_)
        | Error::DivisionByZero(_)
        | Error::Degenerate(_) => ExitStatus::CertificationFailure,
    }
}

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, StageError>;
}

impl<T> Stage<T> for periodpoly::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub status: ExitStatus,
    pub output: String,
    pub error: Option<String>,
}

fn input_error(stage: &'static str, msg: String) -> StageError {
    StageError {
        stage,
        error: Error::InvalidData(msg),
    }
}

pub fn run(cli: Cli) -> Outcome {
    let res = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Values(a) => values_cmd(a),
        Command::DiscTable(a) => disc_table(a),
        Command::ATable(a) => a_table(a),
    };
    match res {
        Ok((status, output)) => Outcome {
            status,
            output,
            error: None,
        },
        Err(e) => Outcome {
            status: classify(&e.error),
            output: String::new(),
            error: Some(e.to_string()),
        },
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A dataset together with what is needed to reproduce it.
struct Ingested {
    data: LFunctionData,
    n: u32,
    inputs: Vec<Value>,
    input_sha: String,
    eps_source: &'static str,
}

fn load_curve(spec: &str) -> Result<(CurveSpec, Value, String), StageError> {
    let path = Path::new(spec);
    if path.exists() {
        let bytes = fs::read(path).map_err(Error::from).stage("ingest")?;
        let text = String::from_utf8_lossy(&bytes);
        let curve = CurveSpec::parse_file(&text).stage("ingest")?;
        let sha = sha256_hex(&bytes);
        Ok((curve, json!({"curve_file": spec, "sha256": sha}), sha))
    } else if let Some(c) = bundled_curve(spec) {
        let sha = sha256_hex(c.to_line().as_bytes());
        Ok((c, json!({"bundled_curve": spec, "sha256": sha}), sha))
    } else {
        Err(StageError {
            stage: "ingest",
            error: Error::InvalidCurve(format!("'{spec}' is neither a readable file nor a bundled curve label")),
        })
    }
}

fn ingest(a: &InputArgs) -> Result<Ingested, StageError> {
    if let Some(spec) = &a.curve {
        let n = match a.sym {
            Some(n) if n >= 3 && n % 2 == 1 => n,
            Some(n) => return Err(input_error("ingest", format!("--sym must be odd and at least 3, got {n}"))),
            None => return Err(input_error("ingest", "--sym is required with --curve".into())),
        };
        let (curve, input, sha) = load_curve(spec)?;
        let (eps, source) = match a.eps {
            Some(e) if e == 1 || e == -1 => (e, "command line"),
            Some(e) => return Err(input_error("ingest", format!("--eps must be 1 or -1, got {e}"))),
            None => match bundled_eps().get(&curve.label, n) {
                Some(e) => (e, "bundled table"),
                None => (sym_root_number(&curve, n).stage("root number")?, "local rule"),
            },
        };
        let data = sym_lfunction_data(&curve, n, a.common.coeff_limit, eps).stage("ingest")?;
        Ok(Ingested {
            data,
            n,
            inputs: vec![input],
            input_sha: sha,
            eps_source: source,
        })
    } else {
        let path = a.coeffs.as_ref().expect("clap requires --curve or --coeffs");
        let bytes = fs::read(path).map_err(Error::from).stage("ingest")?;
        let mut data = parse_coeff_file(&String::from_utf8_lossy(&bytes)).stage("ingest")?;
        let mut source = "file header";
        if let Some(e) = a.eps {
            data.root_number = e;
            data.validate().stage("ingest")?;
            source = "command line";
        }
        let sha = sha256_hex(&bytes);
        Ok(Ingested {
            data,
            n: 0,
            inputs: vec![json!({"coeff_file": path.display().to_string(), "sha256": sha})],
            input_sha: sha,
            eps_source: source,
        })
    }
}

fn precision(c: &Common) -> Result<Precision, StageError> {
    if c.precision_bits < 64 {
        return Err(StageError {
            stage: "config",
            error: Error::InvalidPrecision(format!("--precision-bits must be at least 64, got {}", c.precision_bits)),
        });
    }
    Precision::new(c.precision_bits, c.target_error).stage("config")
}

fn config_json(c: &Common) -> Value {
    json!({
        "precision_bits": c.precision_bits,
        "target_error": format!("{:e}", c.target_error),
        "coeff_limit": c.coeff_limit,
        "radius": c.radius,
    })
}

struct ValueRun {
    vals: SpecialValues,
    cache: Option<Value>,
}

fn special_values(ing: &Ingested, c: &Common, prec: &Precision) -> Result<ValueRun, StageError> {
    let data = &ing.data;
    let mut cache = match &c.cache_dir {
        Some(d) => Some(ValueCache::open(d).stage("cache")?),
        None => None,
    };
    let key = |s: i64, balance: &str| CacheKey {
        label: data.label.clone(),
        n: ing.n,
        s,
        balance: balance.into(),
        precision_bits: prec.mantissa_bits,
        target_error: format!("{:e}", prec.target_abs_error),
        input_sha256: ing.input_sha.clone(),
    };
    let mut fetch = |s: i64, balance: &str, compute: &dyn Fn() -> periodpoly::Result<Ball>| -> Result<Ball, StageError> {
        let k = key(s, balance);
        if let Some(cache) = cache.as_mut() {
            if let Some(b) = cache.get(&k, prec.mantissa_bits).stage("cache")? {
                return Ok(b);
            }
            let b = compute().stage("special values")?;
            cache.put(k, &b).stage("cache")?;
            return Ok(b);
        }
        compute().stage("special values")
    };
    let m = data.m() as i64;
    let mut values = Vec::with_capacity(data.weight as usize);
    for s in 1..=data.weight as i64 {
        let balance = if s > m { "1" } else { "1.1" };
        values.push(fetch(s, balance, &|| completed_lambda(s, data, prec))?);
    }
    let alt = fetch(m + 1, &ALT_BALANCE.to_string(), &|| central_recomputation(data, prec))?;
    let vals = SpecialValues {
        weight: data.weight,
        root_number: data.root_number,
        central: values[m as usize].clone(),
        values,
        central_alt: Some(alt),
    };
    let cache_json = cache.map(|c| json!({"hits": c.hits, "misses": c.misses, "rejected_lines": c.rejected}));
    Ok(ValueRun { vals, cache: cache_json })
}

fn data_json(ing: &Ingested) -> Value {
    let d = &ing.data;
    json!({
        "label": d.label,
        "degree": d.degree,
        "weight": d.weight,
        "conductor": d.conductor,
        "hodge": d.hodge,
        "root_number": d.root_number,
        "root_number_source": ing.eps_source,
        "coefficients": d.coefficients.len(),
        "m": d.m(),
    })
}

fn values_json(vals: &SpecialValues) -> Value {
    let list: Vec<Value> = vals
        .values
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let p = DecimalPair::from(b);
            json!({"s": i + 1, "value": p.0, "radius": p.1})
        })
        .collect();
    let alt = vals.central_alt.as_ref().map(DecimalPair::from);
    json!({"values": list, "central_recomputation": alt})
}

fn finish(common: &Common, json_default: bool, body: Value, table: impl FnOnce() -> String) -> Result<String, StageError> {
    let as_json = common.json || (json_default && !common.table);
    let mut text = if as_json {
        let mut s = serde_json::to_string_pretty(&body).expect("report serializes");
        s.push('\n');
        s
    } else {
        table()
    };
    if let Some(path) = &common.output {
        fs::write(path, &text).map_err(Error::from).stage("output")?;
        text.clear();
    }
    Ok(text)
}

fn header(command: &str, inputs: Vec<Value>, common: &Common) -> Value {
    json!({
        "command": command,
        "library_version": VERSION,
        "inputs": inputs,
        "config": config_json(common),
    })
}

fn values_cmd(a: &InputArgs) -> Result<(ExitStatus, String), StageError> {
    let prec = precision(&a.common)?;
    let ing = ingest(a)?;
    let run = special_values(&ing, &a.common, &prec)?;
    let mut body = header("values", ing.inputs.clone(), &a.common);
    body["data"] = data_json(&ing);
    body["special_values"] = values_json(&run.vals);
    if let Some(c) = run.cache {
        body["cache"] = c;
    }
    let out = finish(&a.common, true, body, || {
        let mut t = format!("{} (w = {}, eps = {})\n", ing.data.label, ing.data.weight, ing.data.root_number);
        for (i, b) in run.vals.values.iter().enumerate() {
            let p = DecimalPair::from(b);
            t.push_str(&format!("Lambda({}) = {} +/- {}\n", i + 1, p.0, p.1));
        }
        t
    })?;
    Ok((ExitStatus::Ok, out))
}

fn analyze(a: &InputArgs) -> Result<(ExitStatus, String), StageError> {
    let prec = precision(&a.common)?;
    let bits = prec.mantissa_bits;
    let ing = ingest(a)?;
    let data = &ing.data;
    let run = special_values(&ing, &a.common, &prec)?;
    let vals = &run.vals;
    let mut status = ExitStatus::Ok;
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |s: ExitStatus, msg: String, status: &mut ExitStatus| {
        *status = status.worst(s);
        failures.push(msg);
    };

    let violations = verify_hypothesis(data, vals);
    for v in &violations {
        fail(ExitStatus::VerificationFailure, format!("hypothesis: {v}"), &mut status);
    }

    let p = build_p_poly(data, vals).stage("polynomials")?;
    let big_p = build_P_poly(data, vals).stage("polynomials")?;
    let q = build_Q_poly(data, vals, bits).stage("polynomials")?;
    let k = pq_scale_factor(data, vals, bits).stage("polynomials")?;
    let recon = reconstruction_residual(&p, &big_p, data.root_number, 64);
    let scaling = pq_scaling_residual(&big_p, &q, &k, 64);
    if !recon.holds || !scaling.holds {
        fail(ExitStatus::VerificationFailure, "polynomial identities do not hold".into(), &mut status);
    }

    let gate = theorem_gate(data, vals).stage("gate")?;

    let roots = poly_roots(&p).stage("roots")?;
    let circle = circle_report(&roots);
    if circle.off_circle_count > 0 {
        fail(ExitStatus::VerificationFailure, format!("{} roots of p off the unit circle", circle.off_circle_count), &mut status);
    }
    if circle.indeterminate_count > 0 {
        fail(ExitStatus::CertificationFailure, format!("{} roots of p not resolved", circle.indeterminate_count), &mut status);
    }
    let forced = if data.root_number < 0 {
        let at_one = roots
            .iter()
            .zip(&circle.status)
            .any(|(r, st)| *st == RootStatus::On && (r.z() - 1.0).norm() <= r.radius.max(1e-8));
        if !at_one {
            fail(ExitStatus::VerificationFailure, "odd sign but no root of p at z = 1".into(), &mut status);
        }
        json!({"expected": true, "found": at_one})
    } else {
        json!({"expected": false})
    };
    let trig = trig_sign_changes(&big_p, data.root_number, 256);

    let disc = if data.degree % 2 == 0 && (0.5..=2.0).contains(&a.common.radius) {
        let res = ApproximantSeries::new(data.degree, data.conductor, a.common.radius, 1e-30)
            .and_then(|s| count_disc_zeros(&s, a.common.radius));
        match res {
            Ok(c) => serde_json::to_value(c).expect("serializes"),
            Err(e) => {
                fail(classify(&e), format!("disc count: {e}"), &mut status);
                json!({"error": e.to_string()})
            }
        }
    } else {
        json!({"skipped": "radius outside [0.5, 2]"})
    };

    let zeta = match zeta_poly_from_values(data, vals) {
        Ok(z) => {
            let chk = check_zeta_properties(&z).stage("zeta polynomial")?;
            if !chk.fe_ok || !chk.roots_ok {
                fail(ExitStatus::VerificationFailure, "zeta polynomial checks fail".into(), &mut status);
            }
            let closed = match resolve_closed_form(data, vals, 1e-9) {
                Ok((c, _)) => serde_json::to_value(c).expect("serializes"),
                Err(e) => {
                    fail(classify(&e), format!("closed form: {e}"), &mut status);
                    json!({"error": e.to_string()})
                }
            };
            json!({
                "polynomial": z.to_json().stage("zeta polynomial")?,
                "checks": chk,
                "closed_form": closed,
            })
        }
        Err(e) => {
            fail(classify(&e), format!("zeta polynomial: {e}"), &mut status);
            json!({"error": e.to_string()})
        }
    };

    let mut body = header("analyze", ing.inputs.clone(), &a.common);
    body["data"] = data_json(&ing);
    body["special_values"] = values_json(vals);
    body["hypothesis"] = json!(violations);
    body["polynomials"] = json!({
        "p": PolySummary::from(&p),
        "P": PolySummary::from(&big_p),
        "Q": PolySummary::from(&q),
        "P_over_Q": DecimalPair::from(&k),
        "reconstruction": recon,
        "scaling": scaling,
    });
    body["gate"] = json!(gate);
    body["roots"] = json!(circle);
    body["forced_root_at_one"] = forced;
    body["trig_sign_changes"] = json!(trig);
    body["disc_count"] = disc;
    body["zeta"] = zeta;
    if let Some(c) = run.cache {
        body["cache"] = c;
    }
    body["status"] = json!({"exit_code": status.code(), "failures": failures});
    let out = finish(&a.common, true, body.clone(), || {
        let mut t = format!("{} (d = {}, w = {}, N = {}, eps = {})\n", data.label, data.degree, data.weight, data.conductor, data.root_number);
        t.push_str(&format!("gate: {:?}\n", gate.case));
        t.push_str(&format!(
            "roots of p: {} on circle, {} off, {} unresolved\n",
            circle.on_circle_count, circle.off_circle_count, circle.indeterminate_count
        ));
        for (r, d) in roots.iter().zip(&circle.moduli_deviation) {
            t.push_str(&format!("  {:+.15} {:+.15}i  ||z|-1| = {d:.1e}\n", r.re, r.im));
        }
        if data.root_number < 0 {
            t.push_str("eps = -1 forces a root of p at z = 1\n");
        }
        t.push_str(&format!("status: {}\n", status.code()));
        t
    })?;
    Ok((status, out))
}

fn disc_table(a: &DiscArgs) -> Result<(ExitStatus, String), StageError> {
    if a.d < 2 || a.d > 12 || a.d % 2 == 1 {
        return Err(input_error("disc table", format!("d must be even with 2 <= d <= 12, got {}", a.d)));
    }
    let r = a.common.radius;
    let mut status = ExitStatus::Ok;
    let mut body = header("disc-table", Vec::new(), &a.common);
    body["d"] = json!(a.d);
    let text;
    if !a.n.is_empty() {
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for &n in &a.n {
            let res = ApproximantSeries::new(a.d, n, r, 1e-30).and_then(|s| count_disc_zeros(&s, r));
            match res {
                Ok(c) => rows.push((n, c.count)),
                Err(e) => {
                    status = status.worst(classify(&e));
                    failures.push(json!({"N": n, "error": e.to_string()}));
                }
            }
        }
        body["counts"] = json!(rows.iter().map(|(n, c)| json!({"N": n, "count": c})).collect::<Vec<_>>());
        body["failures"] = json!(failures);
        let mut t = format!("d = {}, radius = {r}\n{:>10}  count\n", a.d, "N");
        for (n, c) in &rows {
            t.push_str(&format!("{n:>10}  {c}\n"));
        }
        for f in &failures {
            t.push_str(&format!("{:>10}  failed: {}\n", f["N"], f["error"].as_str().unwrap_or("")));
        }
        text = t;
    } else {
        if a.n_min < 1 || a.n_min > a.n_max {
            return Err(input_error("disc table", format!("bad range {}..{}", a.n_min, a.n_max)));
        }
        let table = disc_transitions(a.d, a.n_max, r).stage("disc table")?;
        let mut runs = Vec::new();
        for (i, &(start, count)) in table.runs.iter().enumerate() {
            let end = table.runs.get(i + 1).map_or(a.n_max, |n| n.0 - 1);
            if end < a.n_min || start > a.n_max {
                continue;
            }
            runs.push((start.max(a.n_min), end, count));
        }
        let transitions: Vec<u64> = table.transitions().into_iter().filter(|&n| n > a.n_min && n <= a.n_max).collect();
        body["runs"] = json!(runs.iter().map(|(s, e, c)| json!({"from": s, "to": e, "count": c})).collect::<Vec<_>>());
        body["transitions"] = json!(transitions);
        let mut t = format!("d = {}, radius = {r}, N in [{}, {}]\n", a.d, a.n_min, a.n_max);
        for (s, e, c) in &runs {
            t.push_str(&format!("{:>21}  {c}\n", format!("{s}..{e}")));
        }
        let tr: Vec<String> = transitions.iter().map(u64::to_string).collect();
        t.push_str(&format!("transitions: {}\n", tr.join(" ")));
        text = t;
    }
    let out = finish(&a.common, false, body, || text)?;
    Ok((status, out))
}

fn a_table(a: &ATableArgs) -> Result<(ExitStatus, String), StageError> {
    if a.m_min < 2 || a.m_min > a.m_max {
        return Err(input_error("a table", format!("need 2 <= m_min <= m_max, got {}..{}", a.m_min, a.m_max)));
    }
    let mut rows = Vec::new();
    for m in a.m_min..=a.m_max {
        rows.push((m, compute_a_m(m).stage("a table")?));
    }
    let mut body = header("a-table", Vec::new(), &a.common);
    body["rows"] = json!(rows.iter().map(|(m, v)| json!({"m": m, "A_m": v})).collect::<Vec<_>>());
    let out = finish(&a.common, false, body, || {
        let mut t = format!("{:>6}  A_m\n", "m");
        for (m, v) in &rows {
            t.push_str(&format!("{m:>6}  {v:.12}\n"));
        }
        t
    })?;
    Ok((ExitStatus::Ok, out))
}
