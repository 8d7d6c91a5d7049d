//! Command-line driver for the hypergrass library.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hypergrass::census::{census, CensusError};
use hypergrass::counting::{residue_check, CountingError, CSV_HEADER};
use hypergrass::delta::{
    delta_polynomial, random_normalized, verify_delta_hexagonal, verify_ehom, DeltaError,
};
use hypergrass::exterior::ExteriorError;
use hypergrass::geometry::GeometryError;
use hypergrass::hyperplane::{
    canonical_form, identify_type, is_hexagonal, normalize_eight, section_scan, signature,
    CanonicalEightForm, UpperRadicalMethod,
};
use hypergrass::{AlternatingFunctional, Field, Hyperplane, HyperplaneError, TypeLabel};

use report::{Format, Output};

#[derive(Parser, Debug)]
#[command(
    name = "hypergrass",
    version,
    about = "Hyperplanes of Grassmannians over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Size of the worker pool (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Also put the wall time into the report (breaks byte-identical reruns)
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// p, p^m or large:p
    #[arg(long, default_value = "2")]
    field: String,
}

#[derive(Args, Debug, Clone)]
struct FormArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    /// Additive notation, e.g. 123+456, or @file
    #[arg(long)]
    form: Option<String>,
    /// JSON coefficient map, e.g. {"123":1}, or @file
    #[arg(long)]
    form_json: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Signature of one hyperplane
    Analyze {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// Bucket every projective class of trivectors by type
    Census {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2_000_000)]
        cap: u64,
    },
    /// Print a canonical form
    Canonical {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long = "type")]
        label: TypeLabel,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Hexagonality against singular-plane-freeness (n = 7)
    Hexcheck {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Spread test, and for n = 8 the hyperplane-section scan
    Spreadcheck {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Check the discriminant against hexagonality and the cube identity
    DeltaVerify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = DeltaMode::Hex)]
        mode: DeltaMode,
        /// Eight-dimensional form T9 + sum a_ij ij8; random when absent
        #[arg(long)]
        form: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: u64,
    },
    /// Divisibility residues of the flag count
    Count {
        /// Comma-separated prime powers
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,7,8,9,11,13")]
        q: Vec<u64>,
        /// Single even dimension; otherwise the range given by --n-min/--n-max
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 6)]
        n_min: usize,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// Kernel method against brute force for the upper radical
    Oracle {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DeltaMode {
    Hex,
    Ehom,
    Both,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Cap(String),
    Mismatch(Value),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Mismatch(_) => 4,
            Failure::Internal(_) => 5,
        }
    }
}

impl From<HyperplaneError> for Failure {
    fn from(e: HyperplaneError) -> Failure {
        match e {
            HyperplaneError::Geometry(GeometryError::EnumerationTooLarge { .. }) => {
                Failure::Cap(e.to_string())
            }
            HyperplaneError::Exterior(_)
            | HyperplaneError::ZeroFunctional
            | HyperplaneError::DimensionMismatch(_)
            | HyperplaneError::NeedsTrivector(_)
            | HyperplaneError::RankExceedsDimension { .. }
            | HyperplaneError::InvalidLambda
            | HyperplaneError::TypeUnavailable(_)
            | HyperplaneError::WrongDimension { .. }
            | HyperplaneError::EigenvaluePresent
            | HyperplaneError::DimensionTooSmall { .. } => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<ExteriorError> for Failure {
    fn from(e: ExteriorError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<DeltaError> for Failure {
    fn from(e: DeltaError) -> Failure {
        match e {
            DeltaError::Hyperplane(h) => h.into(),
            DeltaError::CharacteristicTwo | DeltaError::EigenvaluePresent => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Failure {
        match e {
            CensusError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            CensusError::BadDimension { .. } => Failure::Input(e.to_string()),
            CensusError::Hyperplane(h) => h.into(),
        }
    }
}

impl From<CountingError> for Failure {
    fn from(e: CountingError) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn parse_field(a: &FieldArgs) -> Result<Field, Failure> {
    Field::parse_spec(&a.field).map_err(|e| Failure::Input(e.to_string()))
}

// default bound on point enumerations for commands without --cap
const POINT_CAP: u64 = 1_000_000;

/// Fails unless the points of PG(n-1, q) can be listed within `cap`.
fn point_budget(f: &Field, n: usize, cap: u64) -> Result<(), Failure> {
    if !f.is_enumerable() {
        return Err(Failure::Input(format!(
            "field {} is too large to enumerate; only delta-verify --mode ehom accepts it",
            f.spec()
        )));
    }
    let q = f.order() as u128;
    let points = (0..n).try_fold(0u128, |acc, _| acc.checked_mul(q)?.checked_add(1));
    match points {
        Some(p) if p <= cap as u128 => Ok(()),
        _ => Err(Failure::Cap(format!(
            "PG({}, {}) has more than {cap} points",
            n - 1,
            f.order()
        ))),
    }
}

fn read_arg(s: &str) -> Result<String, Failure> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|t| t.trim().to_string())
            .map_err(|e| Failure::Input(format!("{path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn parse_form(f: &Field, a: &FormArgs) -> Result<Hyperplane, Failure> {
    let func = match (&a.form, &a.form_json) {
        (Some(_), Some(_)) => {
            return Err(Failure::Input(
                "give either --form or --form-json, not both".into(),
            ))
        }
        (None, None) => return Err(Failure::Input("missing --form".into())),
        (Some(t), None) => AlternatingFunctional::parse(f, a.n, a.k, &read_arg(t)?)?,
        (None, Some(j)) => {
            let v: Value = serde_json::from_str(&read_arg(j)?)
                .map_err(|e| Failure::Input(format!("--form-json: {e}")))?;
            AlternatingFunctional::from_json_map(f, a.n, a.k, &v)?
        }
    };
    Ok(Hyperplane::new(func)?)
}

fn analyze(f: &Field, h: &Hyperplane, cap: u64) -> Result<Value, Failure> {
    let mut v = json!({
        "n": h.n(),
        "k": h.k(),
        "form": h.functional().to_text(),
        "rank": h.rank(),
        "lower_radical_dim": h.lower_radical().dim(),
    });
    if h.k() == 3 {
        let sig = signature(h)?;
        let label = identify_type(h)?;
        let r = sig.to_report(label);
        for key in [
            "poles",
            "degree_hist",
            "upper_radical_size",
            "spread",
            "singular_plane_free",
            "type",
        ] {
            v[key] = r[key].clone();
        }
        v["depth"] = json!(sig.depth());
    } else {
        let up = h.upper_radical(UpperRadicalMethod::Kernel, cap)?;
        v["upper_radical_size"] = json!(up.len());
        v["spread"] = json!(h.is_spread_like(cap)?);
        v["type"] = json!("Unknown");
    }
    let _ = f;
    Ok(v)
}

fn parse_eight(f: &Field, text: &str) -> Result<CanonicalEightForm, Failure> {
    let func = AlternatingFunctional::parse(f, 8, Some(3), text)?;
    CanonicalEightForm::from_functional(&func)
        .ok_or_else(|| Failure::Input("form is not of the shape T9 + sum a_ij * ij8".into()))
}

fn run(cli: &Cli, out: &mut Output) -> Result<(), Failure> {
    match &cli.cmd {
        Command::Analyze { field, form, cap } => {
            let f = parse_field(field)?;
            point_budget(&f, form.n, *cap)?;
            let h = parse_form(&f, form)?;
            out.meta("analyze", &f, None, Some(*cap));
            out.json(analyze(&f, &h, *cap)?)
        }
        Command::Census { field, n, cap } => {
            let f = parse_field(field)?;
            point_budget(&f, *n, u64::MAX)?;
            out.meta("census", &f, None, Some(*cap));
            let r = census(&f, *n, *cap)?;
            if out.format == Format::Csv {
                let rows = r
                    .buckets
                    .iter()
                    .map(|(k, c)| vec![k.clone(), c.to_string()])
                    .collect();
                return out.csv(&["type", "classes"], rows);
            }
            out.json(serde_json::to_value(&r).unwrap())
        }
        Command::Canonical {
            field,
            label,
            n,
            lambda,
        } => {
            let f = parse_field(field)?;
            let lam = match lambda {
                Some(s) => Some(
                    f.parse_scalar(s)
                        .ok_or_else(|| Failure::Input(format!("bad scalar {s:?}")))?,
                ),
                None => None,
            };
            let n = n.unwrap_or(label.rank());
            let g = canonical_form(*label, n, &f, lam)?;
            out.meta("canonical", &f, None, None);
            out.json(json!({"type": label.to_string(), "n": n, "form": g.to_text()}))
        }
        Command::Hexcheck { field, form } => {
            let f = parse_field(field)?;
            point_budget(&f, form.n, POINT_CAP)?;
            let h = parse_form(&f, form)?;
            out.meta("hexcheck", &f, None, None);
            let sig = signature(&h)?;
            let hex = is_hexagonal(&h)?;
            let agree = hex == (sig.rank == 7 && sig.singular_plane_free);
            let v = json!({
                "hexagonal": hex,
                "rank": sig.rank,
                "singular_plane_free": sig.singular_plane_free,
                "upper_radical_nonempty": sig.upper_radical_size > 0,
                "agree": agree,
            });
            if !agree {
                return Err(Failure::Mismatch(v));
            }
            out.json(v)
        }
        Command::Spreadcheck { field, form } => {
            let f = parse_field(field)?;
            if form.n % 2 == 1 {
                return Err(Failure::Input("spreadcheck needs n even".into()));
            }
            point_budget(&f, form.n, POINT_CAP)?;
            let h = parse_form(&f, form)?;
            out.meta("spreadcheck", &f, None, None);
            let spread = h.is_spread_like(u64::MAX)?;
            let mut v = json!({ "spread": spread });
            if spread && h.k() == 3 {
                v["lines"] = json!(h.upper_radical_from_poles()?.len());
            }
            if h.n() == 8 && h.k() == 3 {
                let r = section_scan(&h)?;
                v["sections"] = serde_json::to_value(&r).unwrap();
                v["equivalence_holds"] = json!(r.holds());
                if !r.holds() {
                    return Err(Failure::Mismatch(v));
                }
            }
            out.json(v)
        }
        Command::DeltaVerify {
            field,
            mode,
            form,
            seed,
            trials,
        } => {
            let f = parse_field(field)?;
            out.meta("delta-verify", &f, Some(*seed), None);
            let d = delta_polynomial()?;
            let mut v = json!({});
            let mut ok = true;
            if matches!(mode, DeltaMode::Hex | DeltaMode::Both) {
                point_budget(&f, 8, POINT_CAP)?;
                let a = match form {
                    Some(t) => normalize_eight(&parse_eight(&f, &read_arg(t)?)?, &f)?,
                    None => random_normalized(&f, &mut ChaCha8Rng::seed_from_u64(*seed)),
                };
                let r = verify_delta_hexagonal(&a, &f, d)?;
                ok &= r.passed();
                v["hexagonal"] = serde_json::to_value(&r).unwrap();
            }
            if matches!(mode, DeltaMode::Ehom | DeltaMode::Both) {
                if *trials == 0 {
                    return Err(Failure::Input("--trials must be at least 1".into()));
                }
                let r = verify_ehom(&f, *trials, *seed, d)?;
                ok &= r.passed();
                v["ehom"] = serde_json::to_value(&r).unwrap();
            }
            v["passed"] = json!(ok);
            if !ok {
                return Err(Failure::Mismatch(v));
            }
            out.json(v)
        }
        Command::Count { q, n, n_min, n_max } => {
            let ns: Vec<usize> = match n {
                Some(n) => vec![*n],
                None => (*n_min..=*n_max).filter(|n| n % 2 == 0).collect(),
            };
            let mut reports = Vec::new();
            for &q in q {
                for &n in &ns {
                    reports.push(residue_check(q, n)?);
                }
            }
            if out.format == Format::Csv {
                let rows = reports.iter().map(|r| r.csv_record().to_vec()).collect();
                return out.csv(&CSV_HEADER, rows);
            }
            out.meta_plain("count");
            out.json(json!({ "reports": reports }))
        }
        Command::Oracle {
            field,
            n,
            k,
            trials,
            seed,
            cap,
        } => {
            let f = parse_field(field)?;
            point_budget(&f, *n, *cap)?;
            out.meta("oracle", &f, Some(*seed), Some(*cap));
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut mismatches = Vec::new();
            for t in 0..*trials {
                let h = hypergrass::hyperplane::random_hyperplane(&f, *n, *k, &mut rng)?;
                let a = h.upper_radical(UpperRadicalMethod::Kernel, *cap)?;
                let b = h.upper_radical(UpperRadicalMethod::BruteForce, *cap)?;
                if a != b {
                    mismatches.push(json!({"trial": t, "form": h.functional().to_text()}));
                }
            }
            let v = json!({
                "n": n,
                "k": k,
                "trials": trials,
                "agree": trials - mismatches.len(),
                "mismatches": mismatches,
            });
            if !v["mismatches"].as_array().unwrap().is_empty() {
                return Err(Failure::Mismatch(v));
            }
            out.json(v)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.common.workers {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .expect("global pool is configured once");
    }
    let start = Instant::now();
    let mut out = Output::new(&cli.common);
    let result = run(&cli, &mut out);
    let elapsed = start.elapsed();
    eprintln!("wall time: {:.3} s", elapsed.as_secs_f64());
    let result = match result {
        Err(Failure::Mismatch(v)) => out
            .json(v)
            .and_then(|_| out.flush(elapsed))
            .and(Err(Failure::Mismatch(Value::Null))),
        Ok(()) => out.flush(elapsed),
        Err(e) => Err(e),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Failure::Input(m) => eprintln!("input error: {m}"),
                Failure::Cap(m) => eprintln!("cap exceeded: {m}"),
                Failure::Mismatch(_) => eprintln!("verification mismatch"),
                Failure::Internal(m) => eprintln!("internal error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
