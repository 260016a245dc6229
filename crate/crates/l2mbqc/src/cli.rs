//! The `l2mbqc` command-line front end.
//!
//! Every subcommand builds a [`Report`] from library calls and renders it as
//! JSON, CSV or an ASCII table. Schedules travel between `compile` and
//! `simulate` as JSON on stdin/stdout. Exit codes: 0 success, 1 verification
//! failure, 2 usage error.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::boolean::{bits_to_index, format_bits, parse_bits, BooleanFunction, Kind};
use crate::error::{Error, Result};
use crate::gates;
use crate::mbqc::{
    compile_pfd_to_ghz, lift_ghz_to_cluster, mod3_protocol, modp_protocol, or_protocol, qsp_symmetric_protocol,
    MeasurementSchedule, ResourceReport,
};
use crate::onequbit::{moore_counter, or_reduction_width};
use crate::pfd::{self, Angle, PeriodicDecomposition};
use crate::qsp::{self, QspAngles};
use crate::sim::{self, EngineKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "L2MBQC_SEED";

#[derive(Parser, Debug)]
#[command(name = "l2mbqc", version, about = "Parity-assisted MBQC: synthesis, compilation and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Dense,
    Mps,
    Auto,
}

impl From<Engine> for EngineKind {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Dense => EngineKind::Dense,
            Engine::Mps => EngineKind::Mps,
            Engine::Auto => EngineKind::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Mod3,
    Modp,
    Symmetric,
    Ghz,
    Lift,
    Or,
}

#[derive(Args, Debug, Clone)]
pub struct FnArgs {
    /// mod<p>[:<j>], and, or, c2, parity, const0, const1, hex:<table>, profile:<bits>
    #[arg(long = "fn")]
    pub func: String,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// ANF, Walsh-Hadamard spectrum and NCHVM bound of a function.
    Analyze(FnArgs),
    /// Periodic Fourier decomposition with residual and sparsity certificate.
    Pfd {
        #[command(flatten)]
        f: FnArgs,
        /// Also verify the closed-form OR decomposition.
        #[arg(long)]
        check_paper: bool,
    },
    /// QSP angle synthesis and failure sweep.
    Qsp {
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 0)]
        j: u32,
        /// Symmetric weight profile, weight 0 first.
        #[arg(long, conflicts_with = "p")]
        profile: Option<String>,
        /// Largest Hamming weight in the sweep.
        #[arg(long, default_value_t = 20)]
        sweep: usize,
        /// Compare with the bundled Mod_{p,0} fixture.
        #[arg(long)]
        table2: bool,
        /// Report the unitary at this signal angle (radians).
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compile a named protocol to a measurement schedule.
    Compile {
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 0)]
        j: u32,
        /// Target function for symmetric, ghz and lift.
        #[arg(long = "fn")]
        func: Option<String>,
    },
    /// Simulate a schedule read from a file or stdin.
    Simulate {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Input bits, x_1 first.
        #[arg(long, conflicts_with = "all")]
        x: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 100)]
        shots: usize,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
        /// Target function; overrides the one carried by the input.
        #[arg(long = "fn")]
        func: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Resource rows for the known constructions.
    Table1 {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        p: u32,
    },
    /// The bundled Mod_{p,0} angle fixture and its failure sweep.
    Table2 {
        #[arg(long, default_value_t = 20)]
        sweep: usize,
    },
}

/// One titled table.
#[derive(Clone, Debug, Default)]
pub struct Section {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    fn new(title: &str, headers: &[&str]) -> Self {
        Section { title: title.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn kv(&mut self, key: &str, value: impl ToString) {
        self.rows.push(vec![key.into(), value.to_string()]);
    }
}

/// Result of a subcommand before rendering.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub sections: Vec<Section>,
    /// Library CSV used instead of the sections when present.
    pub csv: Option<String>,
    /// False when a verification check failed.
    pub ok: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("plain data");
                s.push('\n');
                s
            }
            Format::Csv => match &self.csv {
                Some(csv) => csv.clone(),
                None => self.sections.iter().map(csv_section).collect::<Vec<_>>().join("\n"),
            },
            Format::Table => self.sections.iter().map(ascii_table).collect::<Vec<_>>().join("\n"),
        }
    }
}

fn csv_section(sec: &Section) -> String {
    let mut out = sec.headers.join(",") + "\n";
    for r in &sec.rows {
        out.push_str(&r.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn ascii_table(sec: &Section) -> String {
    let widths: Vec<usize> = (0..sec.headers.len())
        .map(|i| sec.rows.iter().map(|r| r.get(i).map_or(0, |c| c.len())).max().unwrap_or(0).max(sec.headers[i].len()))
        .collect();
    let rule = widths.iter().map(|w| "-".repeat(w + 2)).collect::<Vec<_>>().join("+");
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!(" {c:<w$} "))
            .collect::<Vec<_>>()
            .join("|")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    if !sec.title.is_empty() {
        out.push_str(&sec.title);
        out.push('\n');
    }
    out.push_str(&line(&sec.headers));
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for r in &sec.rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Parses a function spec such as `mod3:0`, `and`, `c2` or `hex:e8`.
pub fn parse_function(spec: &str, n: Option<usize>) -> Result<BooleanFunction> {
    let spec = spec.trim().to_ascii_lowercase();
    if let Some(bits) = spec.strip_prefix("profile:") {
        let profile = parse_bits(bits)?;
        if n.is_some_and(|n| n + 1 != profile.len()) {
            return Err(usage("profile length must be n + 1"));
        }
        return BooleanFunction::from_profile(&profile);
    }
    let n = n.ok_or_else(|| usage(format!("--n is required for {spec:?}")))?;
    if let Some(hex) = spec.strip_prefix("hex:") {
        return BooleanFunction::from_hex(n, hex);
    }
    let kind = match spec.as_str() {
        "and" => Kind::And,
        "or" => Kind::Or,
        "c2" | "pairwise_and" => Kind::PairwiseAnd,
        "parity" | "xor" => Kind::Parity,
        "const0" => Kind::Constant(false),
        "const1" => Kind::Constant(true),
        other => {
            let rest = other.strip_prefix("mod").ok_or_else(|| usage(format!("unknown function {other:?}")))?;
            let (p, j) = rest.split_once(':').unwrap_or((rest, "0"));
            let p = p.parse().map_err(|_| usage(format!("bad modulus in {other:?}")))?;
            let j = j.parse().map_err(|_| usage(format!("bad residue in {other:?}")))?;
            Kind::ModP { p, j }
        }
    };
    BooleanFunction::build(kind, n)
}

/// Closed form `phi_S = (-1)^{|S|-1} (2^{n-|S|+1} - 1) / 2^{n-1}` for `OR_n`.
pub fn or_closed_form_decomposition(n: usize) -> Result<PeriodicDecomposition> {
    if n == 0 || n > 30 {
        return Err(usage("n must be in 1..=30"));
    }
    let den = 1i64 << (n - 1);
    let angles = (1..1u64 << n)
        .map(|s| {
            let k = s.count_ones() as usize;
            let sign = if k % 2 == 1 { 1 } else { -1 };
            (s, Angle::new(sign * ((1i64 << (n - k + 1)) - 1), den))
        })
        .collect();
    PeriodicDecomposition::new(n, angles)
}

fn fmt_f(v: f64) -> String {
    format!("{v:.6e}")
}

fn angle_str(a: &Angle) -> String {
    if *a.denom() == 1 {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

pub fn cmd_analyze(f: &BooleanFunction) -> Report {
    let anf = f.anf();
    let spectrum = f.walsh_spectrum();
    let mut summary = Section::new("summary", &["field", "value"]);
    summary.kv("function", f.kind().name());
    summary.kv("n", f.n());
    summary.kv("table_hex", f.table_hex());
    summary.kv("anf", anf.to_string_terms());
    summary.kv("degree", anf.degree());
    summary.kv("f_max", f.f_max());
    summary.kv("beta", f.nchvm_bound());
    let mut walsh = Section::new("walsh", &["k", "value"]);
    for (k, v) in spectrum.iter().enumerate() {
        walsh.row(vec![format_bits(k as u64, f.n()), v.to_string()]);
    }
    Report {
        json: json!({
            "function": f.to_json(),
            "anf": { "terms": anf.to_string_terms(), "monomials": anf.monomials, "degree": anf.degree() },
            "walsh": spectrum,
            "f_max": f.f_max(),
            "beta": f.nchvm_bound(),
        }),
        csv: None, sections: vec![summary, walsh],
        ok: true,
    }
}

pub fn cmd_pfd(f: &BooleanFunction, check_paper: bool) -> Result<Report> {
    let d = pfd::solve_pfd(f, None)?;
    let check = pfd::verify_pfd(f, &d)?;
    let cert = pfd::sparsity_certificate(f)?;
    let mut ok = check.ok;
    let mut json = json!({
        "function": f.to_json(),
        "decomposition": d.to_json(),
        "support_size": d.support().len(),
        "residual": check.max_residual,
        "verified": check.ok,
        "certificate": {
            "non_integer_count": cert.non_integer_count,
            "full_degree": cert.full_degree,
            "maximal": cert.is_maximal(),
            "odd_integer": cert.odd_integer.iter().map(|(m, b)| json!({"mask": m, "odd": b})).collect::<Vec<_>>(),
        },
    });
    let mut summary = Section::new("summary", &["field", "value"]);
    summary.kv("support_size", d.support().len());
    summary.kv("residual", fmt_f(check.max_residual));
    summary.kv("verified", check.ok);
    summary.kv("non_integer_count", cert.non_integer_count);
    summary.kv("certificate_maximal", cert.is_maximal());
    if check_paper {
        if *f.kind() != Kind::Or {
            return Err(usage("--check-paper is available for --fn or only"));
        }
        let closed = or_closed_form_decomposition(f.n())?;
        let pc = pfd::verify_pfd(f, &closed)?;
        ok &= pc.ok;
        json["closed_form"] = json!({ "decomposition": closed.to_json(), "residual": pc.max_residual, "verified": pc.ok });
        summary.kv("closed_form_verified", pc.ok);
        summary.kv("closed_form_residual", fmt_f(pc.max_residual));
    }
    let mut angles = Section::new("angles", &["mask", "phi_over_pi"]);
    for (m, a) in &d.angles {
        angles.row(vec![format_bits(*m, f.n()), angle_str(a)]);
    }
    Ok(Report { json, csv: None, sections: vec![summary, angles], ok })
}

fn readout_bits(angles: &QspAngles, p: u32, j: u32, sweep: usize) -> Vec<bool> {
    (0..=sweep)
        .map(|w| {
            let shift = (w as i64 - j as i64).rem_euclid(p as i64);
            let phi = 4.0 * std::f64::consts::PI * shift as f64 / p as f64;
            let r = gates::readout(&qsp::reconstruct_unitary(angles, phi));
            r[1] > r[0]
        })
        .collect()
}

fn unitary_json(u: &gates::Mat2) -> Value {
    json!(u.iter().map(|row| row.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn cmd_qsp(
    p: Option<u32>,
    j: u32,
    profile: Option<&str>,
    sweep: usize,
    table2: bool,
    phi: Option<f64>,
    tol: f64,
) -> Result<Report> {
    let mut summary = Section::new("summary", &["field", "value"]);
    let (angles, failure, mut json) = match (p, profile) {
        (Some(p), None) => {
            let angles = qsp::synthesize_mod_p(p, j)?;
            let failure = qsp::verify_qsp(&angles, p, j, sweep);
            summary.kv("target", format!("Mod_{{{p},{j}}}"));
            (angles.clone(), failure, json!({ "p": p, "j": j, "angles": angles, "failure": failure, "sweep": sweep }))
        }
        (None, Some(bits)) => {
            let f = BooleanFunction::from_profile(&parse_bits(bits)?)?;
            let angles = qsp::synthesize_symmetric(&f)?;
            let failure = qsp::verify_symmetric(&angles, f.profile().expect("built from a profile"));
            summary.kv("target", format!("profile {bits}"));
            (angles.clone(), failure, json!({ "profile": bits, "angles": angles, "failure": failure }))
        }
        _ => return Err(usage("give either --p or --profile")),
    };
    summary.kv("L", angles.l);
    summary.kv("failure", fmt_f(failure));
    let mut ok = failure < tol;
    if table2 {
        let p = p.ok_or_else(|| usage("--table2 needs --p"))?;
        if j != 0 {
            return Err(usage("the fixture covers j = 0 only"));
        }
        let fixture = qsp::table2()
            .into_iter()
            .find(|a| a.l == 2 * p as usize - 1)
            .ok_or_else(|| usage(format!("no fixture row for p = {p}")))?;
        let ff = qsp::verify_qsp(&fixture, p, 0, sweep);
        let same = readout_bits(&fixture, p, 0, sweep) == readout_bits(&angles, p, 0, sweep);
        ok &= ff < tol && same;
        json["table2"] = json!({ "angles": fixture, "failure": ff, "same_output_bits": same });
        summary.kv("table2_failure", fmt_f(ff));
        summary.kv("same_output_bits", same);
    }
    if let Some(phi) = phi {
        let u = qsp::reconstruct_unitary(&angles, phi);
        let r = gates::readout(&u);
        let id = gates::phase_overlap(&u, &gates::identity()) / 2.0;
        json["at_phi"] = json!({ "phi": phi, "unitary": unitary_json(&u), "readout": r, "identity_overlap": id });
        summary.kv("phi", phi);
        summary.kv("readout_0", r[0]);
        summary.kv("identity_overlap", id);
    }
    json["ok"] = json!(ok);
    let mut xi = Section::new("angles", &["k", "xi"]);
    for (k, x) in angles.xi.iter().enumerate() {
        xi.row(vec![(k + 1).to_string(), x.to_string()]);
    }
    Ok(Report { json, csv: None, sections: vec![summary, xi], ok })
}

/// Schedule and target function for a named protocol.
pub fn build_protocol(
    protocol: Protocol,
    n: usize,
    p: Option<u32>,
    j: u32,
    func: Option<&str>,
) -> Result<(MeasurementSchedule, BooleanFunction)> {
    let target = |f: Option<&str>| -> Result<BooleanFunction> {
        parse_function(f.ok_or_else(|| usage("--fn is required for this protocol"))?, Some(n))
    };
    Ok(match protocol {
        Protocol::Mod3 => (mod3_protocol(n)?, BooleanFunction::mod_p(3, 0, n)?),
        Protocol::Modp => {
            let p = p.ok_or_else(|| usage("--p is required for modp"))?;
            let angles = qsp::synthesize_mod_p(p, j)?;
            (modp_protocol(p, j, n, &angles)?, BooleanFunction::mod_p(p, j, n)?)
        }
        Protocol::Symmetric => {
            let f = target(func)?;
            let angles = qsp::synthesize_symmetric(&f)?;
            (qsp_symmetric_protocol(&f, &angles)?, f)
        }
        Protocol::Ghz | Protocol::Lift => {
            let f = target(func)?;
            let g = compile_pfd_to_ghz(&pfd::solve_pfd(&f, None)?, f.eval(0))?;
            (if protocol == Protocol::Lift { lift_ghz_to_cluster(&g)? } else { g }, f)
        }
        Protocol::Or => (or_protocol(n)?, BooleanFunction::or(n)?),
    })
}

fn resources_section(r: &ResourceReport) -> Section {
    let mut s = Section::new("resources", &["L_Q", "L_C", "T_C", "T_Q", "volume"]);
    s.row([r.l_q, r.l_c, r.t_c, r.t_q, r.volume].iter().map(|v| v.to_string()).collect());
    s
}

/// Envelope `{"schedule", "target", "resources"}` written by `compile`.
pub fn cmd_compile(s: &MeasurementSchedule, f: &BooleanFunction) -> Report {
    let resources = s.resources();
    let mut qubits = Section::new("schedule", &["id", "round", "basis", "p_mask", "a_ids"]);
    for q in &s.qubits {
        let basis = match q.basis.angle(false) {
            Some(_) => serde_json::to_string(&s.to_json()["qubits"][q.id - 1]["basis"]).expect("plain data"),
            None => "z".into(),
        };
        let a = q.a_ids.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
        qubits.row(vec![q.id.to_string(), q.round.to_string(), basis, format_bits(q.p_mask, s.arity), a]);
    }
    Report {
        json: json!({ "schedule": s.to_json(), "target": f.to_json(), "resources": resources }),
        csv: None, sections: vec![resources_section(&resources), qubits],
        ok: true,
    }
}

/// Reads a bare schedule or a `compile` envelope.
pub fn read_schedule(text: &str) -> Result<(MeasurementSchedule, Option<BooleanFunction>)> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("schedule") {
        Some(s) => {
            let target = v.get("target").map(BooleanFunction::from_json).transpose()?;
            Ok((MeasurementSchedule::from_json(s)?, target))
        }
        None => Ok((MeasurementSchedule::from_json(&v)?, None)),
    }
}

/// Per-input y counts when no target is known.
fn output_counts(s: &MeasurementSchedule, xs: &[u64], shots: usize, seed: u64, kind: EngineKind) -> Result<Report> {
    let mut rows = Section::new("outputs", &["x", "shots", "y1", "analytic_p1", "exact_p1"]);
    let mut inputs = Vec::new();
    for &x in xs {
        let mut ones = 0;
        for shot_seed in sim::shot_seeds(seed, x, shots) {
            ones += usize::from(sim::run_shot(s, x, shot_seed, kind)?.y);
        }
        let analytic = sim::effective_circuit(s, x).ok().map(|e| e.probabilities[1]);
        let exact =
            if s.len() <= sim::MAX_ENUMERATION_QUBITS { Some(sim::exact_distribution(s, x)?[1]) } else { None };
        let opt = |v: Option<f64>| v.map(|p| p.to_string()).unwrap_or_default();
        rows.row(vec![format_bits(x, s.arity), shots.to_string(), ones.to_string(), opt(analytic), opt(exact)]);
        inputs.push(json!({ "x": format_bits(x, s.arity), "shots": shots, "y_ones": ones, "analytic_p1": analytic, "exact_p1": exact }));
    }
    Ok(Report { json: json!({ "inputs": inputs, "resources": s.resources() }), csv: None, sections: vec![rows], ok: true })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_simulate(
    s: &MeasurementSchedule,
    target: Option<&BooleanFunction>,
    x: Option<&str>,
    all: bool,
    shots: usize,
    seed: u64,
    kind: EngineKind,
    tol: f64,
) -> Result<Report> {
    let xs: Vec<u64> = match (x, all) {
        (Some(bits), false) => {
            let b = parse_bits(bits)?;
            if b.len() != s.arity {
                return Err(Error::ArityMismatch { expected: s.arity, got: b.len() });
            }
            vec![bits_to_index(&b)]
        }
        (None, true) => (0..1u64 << s.arity).collect(),
        _ => return Err(usage("give --x <bits> or --all")),
    };
    let Some(f) = target else {
        return output_counts(s, &xs, shots, seed, kind);
    };
    let report = if all {
        sim::verify_protocol(s, f, shots, seed, kind)?
    } else {
        let single = BooleanFunction::from_fn(s.arity, |y| f.eval(y))?;
        let mut r = sim::verify_protocol(s, &single, 0, seed, kind)?;
        r.inputs.retain(|i| i.x == format_bits(xs[0], s.arity));
        let mut correct = 0;
        for shot_seed in sim::shot_seeds(seed, xs[0], shots) {
            correct += usize::from(sim::run_shot(s, xs[0], shot_seed, kind)?.y == f.eval(xs[0]));
        }
        r.inputs[0].shots = shots;
        r.inputs[0].correct = correct;
        r.empirical_rate = if shots == 0 { 1.0 } else { correct as f64 / shots as f64 };
        r.min_analytic = r.inputs[0].analytic;
        r.min_exact = r.inputs[0].exact;
        r
    };
    let ok = report.passed(tol);
    let passing = report.inputs.iter().filter(|i| i.correct == i.shots).count();
    let mut summary = Section::new("summary", &["field", "value"]);
    summary.kv("inputs_all_correct", format!("{passing}/{}", report.inputs.len()));
    summary.kv("empirical_rate", report.empirical_rate);
    summary.kv("min_analytic", report.min_analytic.map(fmt_f).unwrap_or_else(|| "-".into()));
    summary.kv("min_exact", report.min_exact.map(fmt_f).unwrap_or_else(|| "-".into()));
    summary.kv("beta", report.beta);
    summary.kv("resources", report.resources);
    let mut per = Section::new("inputs", &["x", "expected", "analytic", "exact", "shots", "correct"]);
    for i in &report.inputs {
        let opt = |v: Option<f64>| v.map(|p| p.to_string()).unwrap_or_default();
        per.row(vec![
            i.x.clone(),
            u8::from(i.expected).to_string(),
            opt(i.analytic),
            opt(i.exact),
            i.shots.to_string(),
            i.correct.to_string(),
        ]);
    }
    let mut json = report.to_json();
    json["ok"] = json!(ok);
    Ok(Report { json, csv: Some(report.to_csv()), sections: vec![summary, per], ok })
}

/// Measured resources for each construction next to its expected scaling.
pub fn cmd_table1(n: usize, p: u32) -> Result<Report> {
    let modp = BooleanFunction::mod_p(p, 0, n)?;
    let mut sec = Section::new(
        &format!("resources at n = {n}, p = {p}"),
        &["construction", "L_Q", "T_Q", "L_C", "T_C", "expected L_Q / T_Q / L_C / T_C"],
    );
    let mut rows = Vec::new();
    let mut push = |name: &str, r: Option<ResourceReport>, expected: &str| {
        let cells = match r {
            Some(r) => [r.l_q, r.t_q, r.l_c, r.t_c].map(|v| v.to_string()).to_vec(),
            None => vec!["-".into(); 4],
        };
        rows.push(json!({ "construction": name, "resources": r, "expected": expected }));
        let mut row = vec![name.to_string()];
        row.extend(cells);
        row.push(expected.into());
        sec.row(row);
    };
    let ghz = if n <= pfd::MAX_PFD_ARITY {
        Some(compile_pfd_to_ghz(&pfd::solve_pfd(&modp, None)?, modp.eval(0))?.resources())
    } else {
        None
    };
    push("periodic Fourier (GHZ)", ghz, "2^n-1 / 3 / 2^n-1 / 2");
    push("Barrington", None, "O(poly n) / 3 / O(poly n) / O(poly n)");
    push("OR-reduction (OR_n)", Some(or_protocol(n)?.resources()), "Theta(n^2 log n) / 3 / Theta(n log n) / 3");
    let sym = qsp_symmetric_protocol(&modp, &qsp::synthesize_symmetric(&modp)?)?;
    push("QSP on a chain", Some(sym.resources()), "Theta(n^2) / 3 / Theta(n) / Theta(n)");
    let kappa = or_reduction_width(n);
    let counter = moore_counter(p, kappa.min(crate::onequbit::MAX_COUNTER_QUBITS)).map(|c| c.qubits).unwrap_or(0);
    push(
        &format!("Moore counter ({counter}-qubit circuit)"),
        None,
        "O(n log p + p^2 log^3 p) / 5 / Theta(n log p) / O(p^2 log^3 p)",
    );
    let own = if p == 3 { mod3_protocol(n)? } else { modp_protocol(p, 0, n, &qsp::synthesize_mod_p(p, 0)?)? };
    push("mod-p chain", Some(own.resources()), "Theta(pn) / 3 / n+2 / Theta(p)");
    Ok(Report { json: json!({ "n": n, "p": p, "rows": rows }), csv: None, sections: vec![sec], ok: true })
}

pub fn cmd_table2(sweep: usize) -> Report {
    let mut sec = Section::new("Mod_{p,0} fixture", &["p", "L", "fixture failure", "synthesized failure", "xi"]);
    let mut rows = Vec::new();
    let mut ok = true;
    for a in qsp::table2() {
        let p = (a.l as u32).div_ceil(2);
        let ff = qsp::verify_qsp(&a, p, 0, sweep);
        let own = qsp::synthesize_mod_p(p, 0).map(|s| qsp::verify_qsp(&s, p, 0, sweep));
        ok &= ff < 1e-10 && own.as_ref().is_ok_and(|&f| f < 1e-9);
        let own_f = own.as_ref().map(|&f| fmt_f(f)).unwrap_or_else(|e| e.to_string());
        let xi = a.xi.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ");
        sec.row(vec![p.to_string(), a.l.to_string(), fmt_f(ff), own_f, xi]);
        rows.push(json!({ "p": p, "angles": a, "failure": ff, "synthesized_failure": own.ok() }));
    }
    Report { json: json!({ "sweep": sweep, "rows": rows, "ok": ok }), csv: None, sections: vec![sec], ok }
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<Report> {
    match &cli.command {
        Command::Analyze(f) => Ok(cmd_analyze(&parse_function(&f.func, f.n)?)),
        Command::Pfd { f, check_paper } => cmd_pfd(&parse_function(&f.func, f.n)?, *check_paper),
        Command::Qsp { p, j, profile, sweep, table2, phi, tol } => {
            cmd_qsp(*p, *j, profile.as_deref(), *sweep, *table2, *phi, *tol)
        }
        Command::Compile { protocol, n, p, j, func } => {
            let (s, f) = build_protocol(*protocol, *n, *p, *j, func.as_deref())?;
            Ok(cmd_compile(&s, &f))
        }
        Command::Simulate { input, x, all, shots, engine, func, tol } => {
            let text = match input {
                Some(path) => std::fs::read_to_string(path)?,
                None => {
                    let mut t = String::new();
                    stdin.read_to_string(&mut t)?;
                    t
                }
            };
            let (s, carried) = read_schedule(&text)?;
            let target = match func {
                Some(spec) => Some(parse_function(spec, Some(s.arity))?),
                None => carried,
            };
            cmd_simulate(&s, target.as_ref(), x.as_deref(), *all, *shots, cli.seed, (*engine).into(), *tol)
        }
        Command::Table1 { n, p } => cmd_table1(*n, *p),
        Command::Table2 { sweep } => Ok(cmd_table2(*sweep)),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unverified { .. } | Error::Completion(_) | Error::RootPairing(_) | Error::Singular { .. } => {
            EXIT_VERIFY
        }
        _ => EXIT_USAGE,
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let report = match dispatch(&cli, stdin) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let text = report.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    if !report.ok {
        let _ = writeln!(stderr, "verification failed");
        return EXIT_VERIFY;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("l2mbqc").chain(args.iter().copied()), &mut input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn function_specs() {
        assert_eq!(parse_function("mod3:0", Some(3)).unwrap(), BooleanFunction::mod_p(3, 0, 3).unwrap());
        assert_eq!(parse_function("mod5", Some(2)).unwrap(), BooleanFunction::mod_p(5, 0, 2).unwrap());
        assert_eq!(parse_function("c2", Some(4)).unwrap(), BooleanFunction::pairwise_and(4).unwrap());
        assert_eq!(parse_function("const1", Some(2)).unwrap(), BooleanFunction::constant(true, 2).unwrap());
        assert!(parse_function("profile:0110", None).unwrap().is_symmetric());
        assert!(parse_function("nand", Some(2)).is_err());
        assert!(parse_function("and", None).is_err());
    }

    #[test]
    fn analyze_outputs() {
        let (code, out, _) = call(&["analyze", "--fn", "c2", "--n", "4"], "");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["f_max"], 0.25);
        let (_, out, _) = call(&["analyze", "--fn", "const0", "--n", "2"], "");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["beta"], 1.0);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["analyze", "--fn", "bogus", "--n", "2"], "").0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"], "").0, EXIT_USAGE);
        assert_eq!(call(&["analyze", "--fn", "and", "--n", "2", "--nope"], "").0, EXIT_USAGE);
        assert_eq!(call(&["simulate", "--all"], "not json").0, EXIT_USAGE);
        assert_eq!(call(&["--help"], "").0, EXIT_OK);
    }

    #[test]
    fn closed_or_form() {
        let (code, out, _) = call(&["pfd", "--fn", "or", "--n", "2", "--check-paper"], "");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["closed_form"]["verified"], true);
        assert_eq!(call(&["pfd", "--fn", "or", "--n", "3", "--check-paper"], "").0, EXIT_VERIFY);
    }

    #[test]
    fn empty_schedule_gives_c() {
        let s = MeasurementSchedule::constant(1, true).to_json_string();
        let (code, out, _) = call(&["simulate", "--all", "--shots", "3"], &s);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["inputs"][0]["y_ones"], 3);
        assert_eq!(v["inputs"][1]["exact_p1"], 1.0);
    }

    #[test]
    fn table_format_is_ascii() {
        let (code, out, _) = call(&["--format", "table", "analyze", "--fn", "and", "--n", "2"], "");
        assert_eq!(code, 0);
        assert!(out.is_ascii());
        assert!(out.contains("| 0.75"));
        let (_, csv, _) = call(&["--format", "csv", "analyze", "--fn", "and", "--n", "2"], "");
        assert!(csv.starts_with("field,value\n"));
    }
}
