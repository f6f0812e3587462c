use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lieherm::catalog::{catalog, ds_gram, CoframeParams, Family};
use lieherm::curvature::{CurvatureReport, MetricFrame, Orientation};
use lieherm::hermitian::{AlmostHermitianStructure, Compatibility, StructureJson, StructureReport};
use lieherm::lie::{AlgebraJson, LieAlgebra};
use lieherm::linalg::Matrix;
use lieherm::scenarios::{self, AkSample, ClaimId, ConfFlatSample, ScenarioConfig, VerificationReport};
use lieherm::{Error, Field, Float, Q};

#[derive(Parser, Debug)]
#[command(
    name = "lieherm",
    version,
    about = "Curvature and almost-Hermitian structures on 4-dimensional Lie algebras"
)]
struct Cli {
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunFlags {
    /// Arithmetic: exact rationals, or f64 with a zero tolerance.
    #[arg(
        long,
        value_enum,
        default_value = "exact",
        global = true,
        help_heading = "Global options"
    )]
    mode: ModeArg,
    /// Zero tolerance in float mode.
    #[arg(long, default_value_t = Float::DEFAULT_TOL, global = true, help_heading = "Global options")]
    tol: f64,
    /// Seed for all random sampling.
    #[arg(long, default_value_t = 0, global = true, help_heading = "Global options")]
    seed: u64,
    /// Print JSON instead of a text summary.
    #[arg(long, global = true, help_heading = "Global options")]
    json: bool,
    /// Write the JSON result to this file (atomically).
    #[arg(long, global = true, help_heading = "Global options")]
    out: Option<PathBuf>,
    /// Record wall-clock time in verification reports.
    #[arg(long, global = true, help_heading = "Global options")]
    timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the catalog of Lie algebra families.
    Catalog {
        /// Show one family; with --lambda, also its brackets.
        #[arg(long)]
        name: Option<String>,
        /// Parameter of the dS family.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<String>,
    },
    /// Levi-Civita curvature of a left-invariant metric.
    Curvature(CurvatureArgs),
    /// Run a verifier and report pass/fail.
    Verify(VerifyArgs),
    /// Sample metrics on one family and classify the structures found.
    Scan {
        /// Catalog family name.
        name: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

/// `a1..a6` of the `r2prime` Gram-Schmidt coframe.
#[derive(Args, Debug, Default)]
#[command(next_help_heading = "r2prime coframe parameters")]
struct HeadArgs {
    /// Coframe parameter a1 (a1, a3, a6 must be positive).
    #[arg(long, allow_negative_numbers = true)]
    a1: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a2: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a3: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a4: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a5: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a6: Option<String>,
}

impl HeadArgs {
    fn values(&self) -> [&Option<String>; 6] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a5, &self.a6]
    }

    fn any(&self) -> bool {
        self.values().iter().any(|v| v.is_some())
    }

    /// The six parameters, filling gaps from `defaults`.
    fn tuple(&self, mode: ModeArg, defaults: &ConfFlatSample) -> Result<ConfFlatSample, CliError> {
        let mut out = defaults.clone();
        for (i, v) in self.values().iter().enumerate() {
            if let Some(s) = v {
                out[i] = parse_scalar(s, mode)?;
            }
        }
        Ok(out)
    }
}

#[derive(Args, Debug, Default)]
#[command(next_help_heading = "r2prime coframe parameters")]
struct CoframeArgs {
    #[command(flatten)]
    head: HeadArgs,
    /// Setting any of a7..a10 switches off the conformal-flatness relations (defaults 0, 0, 0, 1).
    #[arg(long, allow_negative_numbers = true)]
    a7: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a8: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a9: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a10: Option<String>,
}

impl CoframeArgs {
    fn tail(&self) -> [&Option<String>; 4] {
        [&self.a7, &self.a8, &self.a9, &self.a10]
    }

    fn any(&self) -> bool {
        self.head.any() || self.any_tail()
    }

    fn any_tail(&self) -> bool {
        self.tail().iter().any(|v| v.is_some())
    }

    fn params(&self, mode: ModeArg) -> Result<CoframeParams, CliError> {
        let head = self.head.tuple(mode, &unit_tuple())?;
        if !self.any_tail() {
            let [a1, a2, a3, a4, a5, a6] = head;
            return Ok(CoframeParams::conformally_flat(a1, a2, a3, a4, a5, a6)?);
        }
        let mut a: Vec<Q> = head.to_vec();
        for (i, v) in self.tail().iter().enumerate() {
            let default = if i == 3 { Q::int(1) } else { Q::zero() };
            a.push(
                v.as_deref()
                    .map(|s| parse_scalar(s, mode))
                    .transpose()?
                    .unwrap_or(default),
            );
        }
        Ok(CoframeParams::new(a.try_into().expect("ten values"))?)
    }
}

#[derive(Args, Debug)]
struct CurvatureArgs {
    /// Algebra JSON file ({"dim", "brackets": [{"i","j","k","value"}]}, 1-based).
    #[arg(long, conflicts_with = "name")]
    algebra: Option<PathBuf>,
    /// Catalog family name.
    #[arg(long)]
    name: Option<String>,
    /// Parameter of the dS family.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<String>,
    /// Metric diag(k^2, 1, 1, 1).
    #[arg(long, group = "metric_spec", allow_negative_numbers = true)]
    k: Option<String>,
    /// Diagonal metric, comma separated.
    #[arg(long, group = "metric_spec", value_delimiter = ',')]
    diag: Option<Vec<String>>,
    /// Gram matrix JSON file ([[...], ...]).
    #[arg(long, group = "metric_spec")]
    metric: Option<PathBuf>,
    /// Structure JSON file ({"gram", "orientation", "omega"}); adds a structure report.
    #[arg(long, group = "metric_spec")]
    structure: Option<PathBuf>,
    /// Orientation of e1..e4: 1 or -1.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    orientation: i64,
    /// Gram-Schmidt coframe parameters; a1..a6 alone impose the conformal-flatness relations.
    #[command(flatten)]
    coframe: CoframeArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// dS-kahler, abelian-rr30, r2prime-conf-flat, r2prime-ak or main-theorem.
    claim: String,
    /// Restrict the dS checks to this lambda.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<String>,
    /// Circle parameter: (b2, b3) = ((1-t^2)/(1+t^2), 2t/(1+t^2)).
    #[arg(long, allow_negative_numbers = true)]
    t: Option<String>,
    /// Number of random samples where the claim uses them.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    coframe: HeadArgs,
}

#[derive(Debug)]
struct CliError {
    kind: String,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            kind: "usage".into(),
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError {
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

/// What a command produced: JSON for `--json`/`--out`, text otherwise.
struct Output {
    json: Value,
    text: String,
    passed: bool,
}

fn parse_scalar(s: &str, mode: ModeArg) -> Result<Q, CliError> {
    match s.parse::<Q>() {
        Ok(q) => Ok(q),
        Err(e) if mode == ModeArg::Float => s
            .trim()
            .parse::<f64>()
            .ok()
            .and_then(Q::from_f64)
            .ok_or_else(|| e.into()),
        Err(e) => Err(CliError {
            kind: e.kind().into(),
            message: format!("{e} (decimals are accepted only with --mode float)"),
        }),
    }
}

fn unit_tuple() -> ConfFlatSample {
    [Q::int(1), Q::zero(), Q::int(1), Q::zero(), Q::zero(), Q::int(1)]
}

/// `(a₁, …, a₆) = (1, 2, 3, 1/2, −1, 1)`, used when only some parameters are given.
fn reference_tuple() -> ConfFlatSample {
    [Q::int(1), Q::int(2), Q::int(3), Q::ratio(1, 2), Q::int(-1), Q::int(1)]
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError {
        kind: "io".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError {
        kind: "parse".into(),
        message: format!("{}: {e}", path.display()),
    })
}

fn family(name: &str) -> Result<Family, CliError> {
    Ok(Family::from_name(name)?)
}

fn to_json(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

type BracketRow<'a> = ((usize, usize), Vec<(&'a str, String)>);

fn bracket_table(g: &LieAlgebra<Q>) -> String {
    let entries = g.bracket_entries();
    if entries.is_empty() {
        return "  all brackets vanish\n".into();
    }
    let mut by_pair: Vec<BracketRow> = Vec::new();
    for (i, j, k, v) in entries {
        let sign = if v.is_negative() { "-" } else { "+" };
        let coef = if v.abs().is_one() {
            String::new()
        } else {
            format!("{} ", v.abs())
        };
        let term = (sign, format!("{coef}e{}", k + 1));
        match by_pair.last_mut() {
            Some((p, terms)) if *p == (i, j) => terms.push(term),
            _ => by_pair.push(((i, j), vec![term])),
        }
    }
    by_pair
        .into_iter()
        .map(|((i, j), terms)| {
            let mut rhs = String::new();
            for (n, (sign, t)) in terms.iter().enumerate() {
                rhs += &match (n, *sign) {
                    (0, "+") => t.clone(),
                    (0, _) => format!("-{t}"),
                    _ => format!(" {sign} {t}"),
                };
            }
            format!("  [e{}, e{}] = {rhs}\n", i + 1, j + 1)
        })
        .collect()
}

fn cmd_catalog(run: &RunFlags, name: Option<&str>, lambda: Option<&str>) -> Result<Output, CliError> {
    let entries = catalog();
    let lambda = lambda.map(|s| parse_scalar(s, run.mode)).transpose()?;
    if let Some(name) = name {
        let f = family(name)?;
        let entry = entries
            .iter()
            .find(|e| e.family == f)
            .expect("catalog lists every family");
        if f.has_lambda() && lambda.is_none() {
            return Err(CliError::usage(format!("{name} needs --lambda")));
        }
        let g = entry.instantiate(lambda.as_ref())?;
        let mut js = to_json(entry);
        js["lambda"] = to_json(&lambda);
        js["algebra"] = to_json(&AlgebraJson::from(&g));
        let text = format!("{} ({})\n{}", entry.name, entry.description, bracket_table(&g));
        return Ok(Output {
            json: js,
            text,
            passed: true,
        });
    }
    let mut list = Vec::new();
    let mut text = String::new();
    for e in &entries {
        let mut js = to_json(e);
        let params: Vec<String> = e
            .parameters
            .iter()
            .map(|p| format!("{} ({})", p.name, p.constraint))
            .collect();
        text += &format!(
            "{:<8} {}\n         unimodular: {}{}\n",
            e.name,
            e.description,
            e.unimodular,
            if params.is_empty() {
                String::new()
            } else {
                format!(", parameters: {}", params.join(", "))
            }
        );
        if !e.family.has_lambda() || lambda.is_some() {
            let g = e.instantiate(lambda.as_ref())?;
            js["algebra"] = to_json(&AlgebraJson::from(&g));
            text += &bracket_table(&g);
        }
        list.push(js);
    }
    Ok(Output {
        json: Value::Array(list),
        text,
        passed: true,
    })
}

fn curvature_summary<F: Field + Serialize>(r: &CurvatureReport<F>) -> String {
    let f = &r.flags;
    let opt = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
    format!(
        "mode: {}\nscalar curvature: {}\nflat: {}\nconformally flat: {}\nW+ = 0: {}\nW- = 0: {}\nEinstein: {}\n",
        r.mode,
        r.scalar,
        f.flat,
        f.conformally_flat,
        opt(f.wplus_zero),
        opt(f.wminus_zero),
        f.einstein
    )
}

fn structure_summary<F: Field + Serialize>(s: &StructureReport<F>) -> String {
    let h: Vec<String> = s.h_basis.iter().map(|x| x.to_string()).collect();
    format!(
        "almost-Kahler: {}\nintegrable: {}\nH(e1..e4): {}\nconstant H: {}\n",
        s.almost_kahler,
        s.integrable,
        h.join(", "),
        serde_json::to_string(&s.constant_h).expect("serializes")
    )
}

fn curvature_output<F: Field + Serialize>(
    g: &LieAlgebra<F>,
    m: &MetricFrame<F>,
    s: Option<&AlmostHermitianStructure<F>>,
) -> Result<Output, CliError> {
    let report = CurvatureReport::compute(g, m)?;
    let mut text = curvature_summary(&report);
    let mut js = to_json(&report);
    if let Some(s) = s {
        let sr = StructureReport::compute(g, s)?;
        text += &structure_summary(&sr);
        js["structure"] = to_json(&sr);
    }
    Ok(Output {
        json: js,
        text,
        passed: true,
    })
}

fn cmd_curvature(run: &RunFlags, args: &CurvatureArgs) -> Result<Output, CliError> {
    let mode = run.mode;
    let lambda = args.lambda.as_deref().map(|s| parse_scalar(s, mode)).transpose()?;
    let g: LieAlgebra<Q> = match (&args.algebra, &args.name) {
        (Some(path), _) => LieAlgebra::try_from(&read_json::<AlgebraJson>(path)?)?,
        (None, Some(name)) => {
            let f = family(name)?;
            if f.has_lambda() && lambda.is_none() {
                return Err(CliError::usage(format!("{name} needs --lambda")));
            }
            f.algebra(lambda.as_ref())?
        }
        (None, None) => return Err(CliError::usage("give --algebra FILE or --name NAME")),
    };
    g.jacobi_check()?;
    let orientation = match args.orientation {
        1 => Orientation::Positive,
        -1 => Orientation::Negative,
        o => return Err(CliError::usage(format!("orientation must be 1 or -1, got {o}"))),
    };
    if g.dim() != 4 && (args.k.is_some() || args.coframe.any() || args.structure.is_some()) {
        return Err(CliError::usage("--k, --a*, --structure need a 4-dimensional algebra"));
    }
    let mut omega = None;
    let metric = if let Some(k) = &args.k {
        MetricFrame::new(ds_gram(&parse_scalar(k, mode)?), orientation)?
    } else if let Some(diag) = &args.diag {
        let d = diag
            .iter()
            .map(|s| parse_scalar(s, mode))
            .collect::<Result<Vec<_>, _>>()?;
        if d.len() != g.dim() {
            return Err(CliError::usage(format!("--diag needs {} entries", g.dim())));
        }
        MetricFrame::new(Matrix::diagonal(&d), orientation)?
    } else if let Some(path) = &args.metric {
        MetricFrame::new(Matrix::from_rows(read_json::<Vec<Vec<Q>>>(path)?)?, orientation)?
    } else if let Some(path) = &args.structure {
        let sj: StructureJson = read_json(path)?;
        omega = Some(sj.omega_form()?);
        sj.metric()?
    } else if args.coframe.any() {
        MetricFrame::from_coframe(args.coframe.params(mode)?.coframe(), orientation)?
    } else {
        MetricFrame::identity(g.dim()).with_orientation(orientation)
    };
    if metric.gram().rows() != g.dim() {
        return Err(CliError::usage("metric and algebra dimensions differ"));
    }
    let structure = match omega {
        Some(w) => match AlmostHermitianStructure::from_metric_and_omega(&g, &metric, &w)? {
            Compatibility::Compatible(s) => Some(s),
            Compatibility::Incompatible { .. } => {
                return Err(CliError {
                    kind: "incompatible".into(),
                    message: "omega is not compatible with the metric (J^2 != -Id)".into(),
                })
            }
        },
        None => None,
    };
    match mode {
        ModeArg::Exact => curvature_output(&g, &metric, structure.as_ref()),
        ModeArg::Float => {
            let tol = run.tol;
            let to_f = move |x: &Q| Float::from_q_tol(x, tol);
            let gf = g.map(to_f);
            let mf = metric.map(to_f);
            let sf = structure.as_ref().map(|s| s.map(to_f));
            curvature_output(&gf, &mf, sf.as_ref())
        }
    }
}

fn verify_report(run: &RunFlags, args: &VerifyArgs) -> Result<VerificationReport, CliError> {
    let claim: ClaimId = args.claim.parse()?;
    if run.mode != ModeArg::Exact {
        return Err(CliError::usage("verification runs in exact mode only"));
    }
    let mode = run.mode;
    let lambda = args.lambda.as_deref().map(|s| parse_scalar(s, mode)).transpose()?;
    let t = args.t.as_deref().map(|s| parse_scalar(s, mode)).transpose()?;
    let mut cfg = ScenarioConfig::with_seed(run.seed);
    if let Some(n) = args.samples {
        cfg.conf_flat = scenarios::default_conf_flat_samples(run.seed, n);
        cfg.random_metrics = n;
    }
    if let Some(l) = lambda {
        cfg.lambdas = vec![l];
    }
    if args.coframe.any() {
        cfg.conf_flat = vec![args.coframe.tuple(mode, &reference_tuple())?];
    }
    if let Some(t) = t {
        cfg.circle = vec![t];
    }
    let report = match claim {
        ClaimId::DsKahler => scenarios::verify_ds_kahler_all(&cfg.lambdas, false)?,
        ClaimId::AbelianRr30 => scenarios::verify_abelian_rr30(cfg.seed, cfg.random_metrics)?,
        ClaimId::R2PrimeConfFlat => scenarios::verify_r2prime_conf_flat(&cfg.conf_flat)?,
        ClaimId::R2PrimeAk => {
            let samples: Vec<AkSample> = cfg.ak_samples();
            scenarios::verify_r2prime_ak(&samples)?
        }
        ClaimId::MainTheorem => scenarios::verify_main_theorem(&cfg)?,
    };
    Ok(report)
}

fn report_text(r: &VerificationReport, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let status = if r.passed() { "PASS" } else { "FAIL" };
    *out += &format!("{pad}{status} {}\n", r.claim);
    for c in &r.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let detail = if c.detail.is_empty() || c.passed {
            String::new()
        } else {
            format!(" ({})", c.detail)
        };
        *out += &format!("{pad}  {mark} {}{detail}\n", c.name);
    }
    for s in &r.sub_reports {
        report_text(s, depth + 1, out);
    }
}

fn cmd_verify(run: &RunFlags, args: &VerifyArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut report = verify_report(run, args)?;
    if run.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    let mut text = String::new();
    report_text(&report, 0, &mut text);
    Ok(Output {
        json: to_json(&report),
        text,
        passed: report.passed(),
    })
}

fn cmd_scan(run: &RunFlags, name: &str, samples: usize) -> Result<Output, CliError> {
    if run.mode != ModeArg::Exact {
        return Err(CliError::usage("scan runs in exact mode only"));
    }
    let summary = lieherm::scan::scan(family(name)?, samples, run.seed)?;
    let c = &summary.counts;
    let text = format!(
        "{} samples of {} (seed {})\nflat: {}\nconformally flat: {}\nW+ = 0: {}\nW- = 0: {}\n\
         almost-Kahler structures: {} (Kahler: {})\nconstant H: {}\nnon-constant H: {}\n\
         constant H implies self-dual: {}\n",
        c.metrics,
        summary.family.name(),
        summary.seed,
        c.flat,
        c.conformally_flat,
        c.wplus_zero,
        c.wminus_zero,
        c.almost_kahler,
        c.kahler,
        c.constant_h,
        c.non_constant_h,
        c.constant_h_self_dual
    );
    Ok(Output {
        json: to_json(&summary),
        text,
        passed: true,
    })
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError {
        kind: "io".into(),
        message: format!("{}: {e}", path.display()),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    std::io::Write::write_all(&mut tmp, contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Catalog { name, lambda } => cmd_catalog(&cli.run, name.as_deref(), lambda.as_deref()),
        Command::Curvature(args) => cmd_curvature(&cli.run, args),
        Command::Verify(args) => cmd_verify(&cli.run, args),
        Command::Scan { name, samples } => cmd_scan(&cli.run, name, *samples),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let err = json!({ "error": { "kind": "usage", "message": e.to_string() } });
            eprintln!("{err}");
            return ExitCode::from(2);
        }
        Err(e) => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = run(&cli).and_then(|out| {
        let rendered = serde_json::to_string_pretty(&out.json).expect("serializes") + "\n";
        if let Some(path) = &cli.run.out {
            write_atomic(path, &rendered)?;
        }
        Ok((out, rendered))
    });
    match result {
        Ok((out, rendered)) => {
            if cli.run.json {
                print!("{rendered}");
            } else {
                print!("{}", out.text);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let err = json!({ "error": { "kind": e.kind, "message": e.message } });
            eprintln!("{err}");
            ExitCode::from(2)
        }
    }
}
