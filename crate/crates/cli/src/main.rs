mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use finplane::hecke::HeckeCtx;
use finplane::spectra::{self, ARule, Method};
use finplane::verify::{self, TheoremSet, Tolerances};
use finplane::{DeltaChoice, FieldCtx, PlaneCtx};
use serde::Serialize;

use output::{num, write_csv, write_json, Provenance, TOOL, VERSION};

#[derive(Parser, Debug)]
#[command(name = "finplane", version, about = "Spectra and eigenfunction checks for finite upper half plane graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Edge list of X_q(δ, a) as CSV, plus a JSON summary next to it.
    Graph(Common),
    /// Closed-form (or brute-force) spectrum with the Ramanujan check.
    Spectrum(Common),
    /// Run the idempotent, basis and base-comparison checks.
    Verify(Common),
    /// Moment-matrix identities and eigenvalue moments.
    Moments(Common),
    /// Semicircle statistics over a range of primes.
    Satotate(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Formula,
    Bruteforce,
}

#[derive(Args, Debug)]
struct Common {
    /// Odd prime q.
    #[arg(long)]
    q: Option<u32>,
    /// Inclusive prime range `A:B`.
    #[arg(long = "q-range", conflicts_with = "q")]
    q_range: Option<String>,
    /// Non-square δ, or `auto` for the smallest one.
    #[arg(long, default_value = "auto")]
    delta: String,
    /// Graph parameter a, or `auto` for the smallest a ∉ {0, 4δ}.
    #[arg(long, default_value = "auto")]
    a: String,
    #[arg(long, value_enum, default_value = "formula")]
    method: MethodArg,
    /// Histogram bins on [-2, 2].
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// Output file (a directory for `satotate`); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Comma-separated subset of 1,2,3,4.
    #[arg(long, default_value = "1,2,3,4")]
    theorems: String,
}

/// Bad input; exits with status 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()).into())
}

fn cfg<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> Result<T> {
    r.or_else(|e| config(e.to_string()))
}

enum Outcome {
    Done,
    VerifyFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerifyFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                eprintln!("run `finplane --help` for usage");
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Graph(c) => cmd_graph(&c),
        Command::Spectrum(c) => cmd_spectrum(&c),
        Command::Verify(c) => cmd_verify(&c),
        Command::Moments(c) => cmd_moments(&c),
        Command::Satotate(c) => cmd_satotate(&c),
    }
}

impl Common {
    fn qs(&self) -> Result<Vec<u32>> {
        match (&self.q, &self.q_range) {
            (Some(q), None) => Ok(vec![*q]),
            (None, Some(r)) => {
                let (lo, hi) = r.split_once(':').ok_or_else(|| ConfigError(format!("--q-range `{r}` is not A:B")))?;
                let lo: u32 = cfg(lo.trim().parse())?;
                let hi: u32 = cfg(hi.trim().parse())?;
                if lo > hi {
                    return config(format!("--q-range {lo}:{hi} is empty"));
                }
                let qs = spectra::odd_primes(lo, hi);
                if qs.is_empty() {
                    return config(format!("no odd primes in {lo}:{hi}"));
                }
                Ok(qs)
            }
            _ => config("exactly one of --q or --q-range is required"),
        }
    }

    fn single_q(&self) -> Result<u32> {
        let qs = self.qs()?;
        if self.q_range.is_some() {
            return config("this command takes --q, not --q-range");
        }
        Ok(qs[0])
    }

    fn delta(&self) -> Result<DeltaChoice> {
        if self.delta.eq_ignore_ascii_case("auto") {
            Ok(DeltaChoice::Auto)
        } else {
            Ok(DeltaChoice::Value(cfg(self.delta.parse())?))
        }
    }

    fn a_rule(&self) -> Result<ARule> {
        if self.a.eq_ignore_ascii_case("auto") {
            Ok(ARule::SmallestValid)
        } else {
            Ok(ARule::Fixed(cfg(self.a.parse())?))
        }
    }

    fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for item in &self.tol {
            let (k, v) =
                item.split_once('=').ok_or_else(|| ConfigError(format!("--tol `{item}` is not name=value")))?;
            let v: f64 = cfg(v.trim().parse())?;
            if v.is_nan() || v <= 0.0 {
                return config(format!("--tol {k} must be positive"));
            }
            cfg(t.set(k.trim(), v))?;
        }
        Ok(t)
    }

    fn hecke(&self, q: u32) -> Result<HeckeCtx> {
        let field = cfg(FieldCtx::new(q, self.delta()?))?;
        Ok(HeckeCtx::new(PlaneCtx::new(field)))
    }

    /// Graph parameter for a single graph: any `a ≠ 0` below q.
    fn graph_a(&self, plane: &PlaneCtx) -> Result<u32> {
        match self.a_rule()? {
            ARule::SmallestValid => cfg(ARule::SmallestValid.pick(plane)),
            ARule::Fixed(0) => config("a = 0 gives a degenerate graph (self-loops only)"),
            ARule::Fixed(a) if a >= plane.q() => config(format!("a = {a} is not in F_{}", plane.q())),
            ARule::Fixed(a) => Ok(a),
        }
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn provenance(&self, command: &'static str, q: String, delta: String, a: String) -> Result<Provenance> {
        Ok(Provenance {
            tool: TOOL,
            version: VERSION,
            command,
            q,
            delta,
            a,
            a_rule: self.a_rule()?.describe(),
            tolerances: self.tolerances()?,
        })
    }
}

fn joined<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GraphSummary {
    q: u32,
    delta: u32,
    a: u32,
    vertices: usize,
    degree: usize,
    edges: usize,
}

fn companion_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn cmd_graph(c: &Common) -> Result<Outcome> {
    let q = c.single_q()?;
    let h = c.hecke(q)?;
    let plane = h.plane();
    let a = c.graph_a(plane)?;
    let edges = cfg(spectra::edge_list(plane, a))?;
    let prov = c.provenance("graph", q.to_string(), plane.field().delta().to_string(), a.to_string())?;
    let rows: Vec<Vec<String>> = edges.iter().map(|&(u, v)| vec![u.to_string(), v.to_string()]).collect();
    write_csv(c.out.as_deref(), &prov, &["u", "v"], &rows)?;
    if let Some(out) = &c.out {
        let summary = GraphSummary {
            q,
            delta: plane.field().delta(),
            a,
            vertices: plane.num_points(),
            degree: plane.sphere_size(a),
            edges: edges.len(),
        };
        let json = companion_path(out);
        if json == *out {
            bail!("--out {} already has a .json extension; use .csv", out.display());
        }
        write_json(Some(&json), &prov, &summary)?;
    }
    Ok(Outcome::Done)
}

fn cmd_spectrum(c: &Common) -> Result<Outcome> {
    let method = match c.method {
        MethodArg::Formula => Method::Formula,
        MethodArg::Bruteforce => Method::Bruteforce,
    };
    let mut reports = Vec::new();
    for q in c.qs()? {
        let h = c.hecke(q)?;
        let a = c.graph_a(h.plane())?;
        reports.push(cfg(spectra::spectrum_report(&h, a, method))?);
    }
    let prov = c.provenance(
        "spectrum",
        joined(reports.iter().map(|r| r.q)),
        joined(reports.iter().map(|r| r.delta)),
        joined(reports.iter().map(|r| r.a)),
    )?;
    match c.format_or(Format::Json) {
        Format::Json if reports.len() == 1 => write_json(c.out.as_deref(), &prov, &reports[0])?,
        Format::Json => write_json(c.out.as_deref(), &prov, &serde_json::json!({ "reports": reports }))?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.eigenvalues.iter().map(move |e| {
                        vec![
                            r.q.to_string(),
                            r.a.to_string(),
                            e.rep_index.to_string(),
                            e.kind.clone(),
                            e.dim.to_string(),
                            num(e.lambda),
                        ]
                    })
                })
                .collect();
            write_csv(c.out.as_deref(), &prov, &["q", "a", "repIndex", "kind", "dim", "lambda"], &rows)?;
        }
    }
    Ok(Outcome::Done)
}

fn cmd_verify(c: &Common) -> Result<Outcome> {
    let which = cfg(TheoremSet::parse(&c.theorems))?;
    let tol = c.tolerances()?;
    let qs = c.qs()?;
    if let Some(&q) = qs.iter().find(|&&q| q > finplane::hecke::DENSE_LIMIT) {
        return config(format!("verify supports q ≤ {} (got {q})", finplane::hecke::DENSE_LIMIT));
    }
    let mut reports = Vec::new();
    for &q in &qs {
        let h = c.hecke(q)?;
        reports.push(cfg(verify::verify(&h, which, &tol))?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let prov = c.provenance("verify", joined(&qs), joined(reports.iter().map(|r| r.delta)), "-".into())?;
    if c.format_or(Format::Json) == Format::Csv {
        return config("verify writes JSON only");
    }
    if reports.len() == 1 {
        write_json(c.out.as_deref(), &prov, &reports[0])?;
    } else {
        write_json(c.out.as_deref(), &prov, &serde_json::json!({ "reports": reports, "pass": pass }))?;
    }
    for r in &reports {
        eprintln!("q={}: {}", r.q, if r.pass { "all checks pass" } else { "FAILED" });
    }
    Ok(if pass { Outcome::Done } else { Outcome::VerifyFailed })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MomentsRow {
    q: u32,
    delta: u32,
    a: u32,
    mmt_residual: f64,
    mtm_residual: f64,
    weighted_m1: f64,
    weighted_m2: f64,
    weighted_m2_expected: f64,
    m1: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

fn cmd_moments(c: &Common) -> Result<Outcome> {
    let mut rows = Vec::new();
    for q in c.qs()? {
        let h = c.hecke(q)?;
        let a = c.graph_a(h.plane())?;
        let r = spectra::moment_matrix(&h).residuals();
        let (wm1, wm2, wexp) = spectra::weighted_moments(&h, a);
        let [m1, m2, m3, m4] = spectra::unweighted_moments(&spectra::normalized_nontrivial(&h, a));
        rows.push(MomentsRow {
            q,
            delta: h.plane().field().delta(),
            a,
            mmt_residual: r.mmt,
            mtm_residual: r.mtm,
            weighted_m1: wm1,
            weighted_m2: wm2,
            weighted_m2_expected: wexp,
            m1,
            m2,
            m3,
            m4,
        });
    }
    let prov = c.provenance(
        "moments",
        joined(rows.iter().map(|r| r.q)),
        joined(rows.iter().map(|r| r.delta)),
        joined(rows.iter().map(|r| r.a)),
    )?;
    match c.format_or(Format::Json) {
        Format::Json => write_json(c.out.as_deref(), &prov, &serde_json::json!({ "rows": rows }))?,
        Format::Csv => {
            let header = [
                "q",
                "a",
                "mmtResidual",
                "mtmResidual",
                "weightedM1",
                "weightedM2",
                "weightedM2Expected",
                "m1",
                "m2",
                "m3",
                "m4",
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![r.q.to_string(), r.a.to_string()];
                    v.extend(
                        [r.mmt_residual, r.mtm_residual, r.weighted_m1, r.weighted_m2, r.weighted_m2_expected]
                            .into_iter()
                            .chain([r.m1, r.m2, r.m3, r.m4])
                            .map(num),
                    );
                    v
                })
                .collect();
            write_csv(c.out.as_deref(), &prov, &header, &body)?;
        }
    }
    Ok(Outcome::Done)
}

fn cmd_satotate(c: &Common) -> Result<Outcome> {
    if c.bins == 0 {
        return config("--bins must be positive");
    }
    if !c.delta.eq_ignore_ascii_case("auto") {
        return config("satotate sweeps several primes; --delta must be auto");
    }
    let qs = c.qs()?;
    let rule = c.a_rule()?;
    let rows = cfg(spectra::sato_tate_report(&qs, rule, c.bins))?;
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let prov =
        c.provenance("satotate", joined(&qs), joined(rows.iter().map(|r| r.delta)), joined(rows.iter().map(|r| r.a)))?;
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![r.q.to_string(), r.a.to_string()];
            v.extend([r.m1, r.m2, r.m3, r.m4, r.ks].map(num));
            v
        })
        .collect();
    write_csv(Some(&dir.join("moments.csv")), &prov, &["q", "a", "m1", "m2", "m3", "m4", "ks"], &body)?;
    for r in &rows {
        let prov = c.provenance("satotate", r.q.to_string(), r.delta.to_string(), r.a.to_string())?;
        let body: Vec<Vec<String>> = r
            .histogram
            .iter()
            .map(|b| vec![num(b.bin_left), num(b.bin_right), b.count.to_string(), num(b.semicircle_mass)])
            .collect();
        let path = dir.join(format!("hist_q{}.csv", r.q));
        write_csv(Some(&path), &prov, &["binLeft", "binRight", "count", "semicircleMass"], &body)?;
    }
    if let Some(r) = rows.iter().find(|r| !r.ramanujan_pass) {
        return Err(anyhow!("q={} a={}: eigenvalue outside the Ramanujan bound", r.q, r.a));
    }
    Ok(Outcome::Done)
}
