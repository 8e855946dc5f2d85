//! Command-line front end: spec-string grammar, subcommands and report output.
//!
//! Every report is a JSON object `{ "metadata": …, "result": … }` whose
//! metadata echoes the full configuration and seed. Outputs contain no
//! timestamps or host data, so a repeated run is byte-identical.

use crate::completeness::{
    build_witness, classify, finite_rank_diagnostic, gram_matrix, ClassifyTolerance, RankConfig,
    WitnessConfig, DEFAULT_MAX_GRAM_POINTS,
};
use crate::error::{Error, Result};
use crate::family::{MomentConfig, RhoFamily};
use crate::growth::{
    estimate_order_type, family_radii, geometric_radii, order_type_from_coefficients, GrowthConfig,
    GrowthProfile, LogModulusFn, TaylorSeries,
};
use crate::sequences::{default_density_radii, estimate_density, PhasePolicy, PointSequence, SequenceKind};
use crate::specfun::lgamma;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

const GRAMMAR: &str = "\
Spec grammar:
  family    factorial | factorial_squared | rho2 | ml:ALPHA:BETA | custom:PATH
  sequence  lattice:A=AREA | line:l=SPACING | radial:t=T,delta=D | radiallog:s=S | file:PATH
            optional keys: count=N, phase=zero|random, seed=U64 (defaults to --seed)
  function  extremal | coherent:re=X,im=Y | exp:s=S,r=INT   (extremal/coherent use --family)
  radii     MIN:MAX:COUNT (geometric)

Exit codes: 0 ok, 1 contract violation or undecidable result, 2 bad input.";

#[derive(Debug, Parser, Serialize)]
#[command(name = "genbargmann", version, about = "Generalized Bargmann representations and coherent-state completeness", after_help = GRAMMAR)]
pub struct Cli {
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random phases.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    MaxModulus,
    Coefficients,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    /// List families with their growth exponents.
    Families {
        /// A single family spec.
        family: Option<String>,
    },
    /// Estimate the density of a sequence and classify the coherent-state set.
    Classify {
        #[arg(long)]
        family: String,
        #[arg(long)]
        seq: String,
        #[arg(long)]
        radii: Option<String>,
        /// Equality bands `T,DELTA_REL` (default 0.02,0.03).
        #[arg(long)]
        tol: Option<String>,
    },
    /// Build a state orthogonal to every coherent state labelled by the sequence.
    Witness {
        #[arg(long)]
        family: String,
        #[arg(long)]
        seq: String,
        /// Genus of the canonical product (default from the density order).
        #[arg(long)]
        p: Option<u32>,
        /// Zero multiplicity at the origin.
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 200)]
        truncation: usize,
        #[arg(long, default_value_t = 120)]
        degree: usize,
        /// Write the Fock amplitudes as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Estimate order and type of an entire function.
    Growth {
        #[arg(long)]
        function: String,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        radii: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::MaxModulus)]
        method: MethodArg,
        /// Write the (R, ln M) table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Estimate the density of a sequence.
    Density {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        radii: Option<String>,
        /// Write the points as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the moment identities of a family's weight.
    Moments {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },
    /// Gram matrix and truncated rank diagnostic for a finite point set.
    Gram {
        #[arg(long)]
        family: String,
        #[arg(long)]
        seq: String,
        #[arg(long, default_value_t = 40)]
        fock_dim: usize,
        /// Largest allowed Fock tail mass beyond fock_dim.
        #[arg(long, default_value_t = 1e-10)]
        tail_tol: f64,
        /// Write the singular values as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// A report: JSON for machines, a short summary for people.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    pub fn json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialise");
        s.push('\n');
        s
    }
}

/// Exit code for an error: 2 for bad input, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        2
    } else {
        1
    }
}

fn parse_err(input: &str, position: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        position,
        msg: msg.into(),
    }
}

fn parse_f64(input: &str, field: &str, position: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| parse_err(input, position, format!("`{field}`: {e}")))
}

/// Splits `k=v,k=v` starting at byte `offset` of `input`.
fn key_values<'a>(input: &'a str, body: &'a str, offset: usize) -> Result<Vec<(&'a str, &'a str, usize)>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for part in body.split(',') {
        if part.is_empty() {
            return Err(parse_err(input, pos, "empty field"));
        }
        let Some(eq) = part.find('=') else {
            return Err(parse_err(input, pos, format!("expected key=value, got `{part}`")));
        };
        out.push((&part[..eq], &part[eq + 1..], pos + eq + 1));
        pos += part.len() + 1;
    }
    Ok(out)
}

pub fn parse_family(spec: &str) -> Result<RhoFamily> {
    let (head, rest) = match spec.find(':') {
        Some(i) => (&spec[..i], Some((&spec[i + 1..], i + 1))),
        None => (spec, None),
    };
    match (head, rest) {
        ("factorial", None) => Ok(RhoFamily::factorial()),
        ("factorial_squared", None) => Ok(RhoFamily::factorial_squared()),
        ("rho2", None) => Ok(RhoFamily::rho2()),
        ("ml" | "mittag_leffler", Some((body, off))) => {
            let Some(c) = body.find(':') else {
                return Err(parse_err(spec, off + body.len(), "expected ml:ALPHA:BETA"));
            };
            let alpha = parse_f64(spec, &body[..c], off)?;
            let beta = parse_f64(spec, &body[c + 1..], off + c + 1)?;
            RhoFamily::mittag_leffler(alpha, beta).map_err(|e| parse_err(spec, off, e.to_string()))
        }
        ("custom", Some((path, _))) => RhoFamily::load_custom(Path::new(path)),
        ("factorial" | "factorial_squared" | "rho2", Some((_, off))) => {
            Err(parse_err(spec, off - 1, "this family takes no parameters"))
        }
        _ => Err(parse_err(spec, 0, format!("unknown family `{head}`"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeqSpec {
    /// `None` for `file:` specs.
    pub kind: Option<SequenceKind>,
    pub path: Option<PathBuf>,
    pub count: Option<usize>,
    pub phase: PhasePolicy,
}

pub fn parse_sequence(spec: &str, default_seed: u64) -> Result<SeqSpec> {
    let Some(colon) = spec.find(':') else {
        return Err(parse_err(spec, spec.len(), "expected KIND:PARAMS"));
    };
    let (head, body, off) = (&spec[..colon], &spec[colon + 1..], colon + 1);
    if head == "file" {
        return Ok(SeqSpec {
            kind: None,
            path: Some(PathBuf::from(body)),
            count: None,
            phase: PhasePolicy::Zero,
        });
    }
    let mut params: Vec<(&str, f64)> = Vec::new();
    let mut count = None;
    let mut random = false;
    let mut seed = default_seed;
    for (k, v, pos) in key_values(spec, body, off)? {
        match k {
            "count" => {
                count = Some(v.parse::<usize>().map_err(|e| parse_err(spec, pos, format!("count: {e}")))?)
            }
            "phase" => match v {
                "zero" => random = false,
                "random" => random = true,
                _ => return Err(parse_err(spec, pos, "phase must be zero or random")),
            },
            "seed" => seed = v.parse::<u64>().map_err(|e| parse_err(spec, pos, format!("seed: {e}")))?,
            _ => params.push((k, parse_f64(spec, v, pos)?)),
        }
    }
    let get = |name: &str| -> Result<f64> {
        params
            .iter()
            .find(|(k, _)| *k == name)
            .map(|p| p.1)
            .ok_or_else(|| parse_err(spec, spec.len(), format!("missing `{name}=`")))
    };
    let allowed: &[&str] = match head {
        "lattice" => &["A"],
        "line" => &["l"],
        "radial" => &["t", "delta"],
        "radiallog" => &["s"],
        _ => return Err(parse_err(spec, 0, format!("unknown sequence kind `{head}`"))),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
        let pos = spec.find(&format!("{k}=")).unwrap_or(0);
        return Err(parse_err(spec, pos, format!("unknown key `{k}` for {head}")));
    }
    let kind = match head {
        "lattice" => SequenceKind::RectangularLattice { area: get("A")? },
        "line" => SequenceKind::OneDLattice { spacing: get("l")? },
        "radial" => SequenceKind::Radial {
            t: get("t")?,
            delta: get("delta")?,
        },
        _ => SequenceKind::RadialLog { s: get("s")? },
    };
    Ok(SeqSpec {
        kind: Some(kind),
        path: None,
        count,
        phase: if random {
            PhasePolicy::SeededRandom { seed }
        } else {
            PhasePolicy::Zero
        },
    })
}

impl SeqSpec {
    pub fn build(&self, default_count: usize) -> Result<PointSequence> {
        match (&self.kind, &self.path) {
            (Some(k), _) => PointSequence::generate(*k, self.phase, self.count.unwrap_or(default_count)),
            (None, Some(p)) => {
                let f = File::open(p)?;
                PointSequence::read_csv(BufReader::new(f), self.phase)
            }
            _ => unreachable!("a sequence spec has a kind or a path"),
        }
    }
}

pub fn parse_radii(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(parse_err(spec, 0, "expected MIN:MAX:COUNT"));
    }
    let min = parse_f64(spec, parts[0], 0)?;
    let max_pos = parts[0].len() + 1;
    let max = parse_f64(spec, parts[1], max_pos)?;
    let count_pos = max_pos + parts[1].len() + 1;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|e| parse_err(spec, count_pos, format!("count: {e}")))?;
    if !(min > 0.0 && max > min) {
        return Err(parse_err(spec, 0, "need 0 < MIN < MAX"));
    }
    if count < 2 {
        return Err(parse_err(spec, count_pos, "need COUNT >= 2"));
    }
    Ok(geometric_radii(min, max, count))
}

fn parse_tol(spec: &str) -> Result<ClassifyTolerance> {
    let Some(c) = spec.find(',') else {
        return Err(parse_err(spec, spec.len(), "expected T,DELTA_REL"));
    };
    Ok(ClassifyTolerance {
        t: parse_f64(spec, &spec[..c], 0)?,
        delta_rel: parse_f64(spec, &spec[c + 1..], c + 1)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionSpec {
    Extremal,
    Coherent(Complex64),
    Exp { s: f64, r: u32 },
}

pub fn parse_function(spec: &str) -> Result<FunctionSpec> {
    let (head, body) = match spec.find(':') {
        Some(i) => (&spec[..i], Some((&spec[i + 1..], i + 1))),
        None => (spec, None),
    };
    match (head, body) {
        ("extremal", None) => Ok(FunctionSpec::Extremal),
        ("coherent", Some((b, off))) => {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, v, pos) in key_values(spec, b, off)? {
                match k {
                    "re" => re = parse_f64(spec, v, pos)?,
                    "im" => im = parse_f64(spec, v, pos)?,
                    _ => return Err(parse_err(spec, pos - k.len() - 1, format!("unknown key `{k}`"))),
                }
            }
            Ok(FunctionSpec::Coherent(Complex64::new(re, im)))
        }
        ("exp", Some((b, off))) => {
            let (mut s, mut r) = (None, None);
            for (k, v, pos) in key_values(spec, b, off)? {
                match k {
                    "s" => s = Some(parse_f64(spec, v, pos)?),
                    "r" => {
                        r = Some(v.parse::<u32>().map_err(|e| parse_err(spec, pos, format!("r: {e}")))?)
                    }
                    _ => return Err(parse_err(spec, pos - k.len() - 1, format!("unknown key `{k}`"))),
                }
            }
            match (s, r) {
                (Some(s), Some(r)) if s > 0.0 && r >= 1 => Ok(FunctionSpec::Exp { s, r }),
                (Some(_), Some(_)) => Err(parse_err(spec, off, "need s > 0 and integer r >= 1")),
                _ => Err(parse_err(spec, spec.len(), "expected exp:s=S,r=R")),
            }
        }
        _ => Err(parse_err(spec, 0, format!("unknown function `{spec}`"))),
    }
}

fn family_entry(f: &RhoFamily) -> Value {
    let (a, b, crit) = match f.growth_exponents() {
        Ok(e) => (json!(e.a), json!(e.b), json!(e.critical_delta())),
        Err(_) => (Value::Null, Value::Null, Value::Null),
    };
    json!({ "name": f.name(), "a": a, "b": b, "critical_delta": crit, "closed_forms": f.has_closed_forms() })
}

fn growth_text(g: &GrowthProfile) -> String {
    format!(
        "order {:.6}  type {:.6}  fit residual {:.3e}  ({:?}, {} samples in fit)",
        g.order, g.type_, g.fit_residual, g.method, g.window
    )
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Default number of generated points when a sequence string has no `count=`.
pub const DEFAULT_COUNT: usize = 20_000;

/// Runs a parsed command and returns its report (with metadata).
pub fn run(cli: &Cli) -> Result<Report> {
    let (name, result, text) = match &cli.command {
        Command::Families { family } => {
            let fams = match family {
                Some(s) => vec![parse_family(s)?],
                None => RhoFamily::named_families(),
            };
            let entries: Vec<Value> = fams.iter().map(family_entry).collect();
            let text = entries
                .iter()
                .map(|e| {
                    format!(
                        "{:<24} a = {}  b = {}  critical delta = {}  closed forms: {}",
                        e["name"].as_str().unwrap_or(""),
                        e["a"],
                        e["b"],
                        e["critical_delta"],
                        e["closed_forms"]
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            ("families", Value::Array(entries), text)
        }
        Command::Classify { family, seq, radii, tol } => {
            let fam = parse_family(family)?;
            let seq = parse_sequence(seq, cli.seed)?.build(DEFAULT_COUNT)?;
            let radii = match radii {
                Some(r) => parse_radii(r)?,
                None => default_density_radii(&seq),
            };
            let tol = match tol {
                Some(t) => parse_tol(t)?,
                None => ClassifyTolerance::ESTIMATED,
            };
            let density = estimate_density(&seq, &radii)?;
            let v = classify(&fam, &density, &tol)?;
            let mut text = format!("{:?}: {}", v.kind, v.rationale);
            if let Some(c) = &v.caveat {
                text.push_str(&format!("\nnote: {c}"));
            }
            (
                "classify",
                json!({ "density": density, "nominal_density": seq.nominal_density(), "verdict": v }),
                text,
            )
        }
        Command::Witness {
            family,
            seq,
            p,
            m,
            truncation,
            degree,
            csv,
        } => {
            let fam = parse_family(family)?;
            let seq = parse_sequence(seq, cli.seed)?.build(*truncation)?;
            let rep = build_witness(&fam, &seq, *p, *m, *truncation, *degree, &WitnessConfig::default())?;
            if let Some(path) = csv {
                write_file(path, |w| rep.witness.write_fock_csv(w))?;
            }
            let mut text = format!(
                "witness: genus {}, {} zeros, degree {}, norm {:.6e}, max orthogonality residual {:.3e}",
                rep.genus_p, rep.truncation_n, rep.taylor_degree, rep.norm, rep.max_orthogonality_residual
            );
            match (&rep.growth, &rep.growth_error) {
                (Some(g), _) => text.push_str(&format!("\ngrowth of P: {}", growth_text(g))),
                (None, Some(e)) => text.push_str(&format!("\ngrowth of P unavailable: {e}")),
                _ => {}
            }
            ("witness", serde_json::to_value(&rep).map_err(json_err)?, text)
        }
        Command::Growth {
            function,
            family,
            radii,
            method,
            csv,
        } => {
            let spec = parse_function(function)?;
            let fam = match family {
                Some(f) => Some(parse_family(f)?),
                None => None,
            };
            let need_family = || {
                fam.clone()
                    .ok_or_else(|| Error::InvalidInput(format!("`{function}` needs --family")))
            };
            let radii = match (radii, &spec) {
                (Some(r), _) => parse_radii(r)?,
                (None, FunctionSpec::Exp { s, r }) => family_radii(&crate::family::GrowthExponents {
                    a: *r as f64,
                    b: *s,
                }),
                (None, _) => family_radii(&need_family()?.growth_exponents()?),
            };
            let r_max = *radii.last().expect("radii are non-empty");
            let series = match spec {
                FunctionSpec::Extremal => Some(TaylorSeries::extremal(&need_family()?, r_max)?),
                FunctionSpec::Coherent(z) => Some(TaylorSeries::coherent(&need_family()?, z, r_max)?),
                FunctionSpec::Exp { s, r } if *method == MethodArg::Coefficients => {
                    Some(TaylorSeries::generate(
                        move |n| {
                            if n % r as u64 == 0 {
                                let k = (n / r as u64) as f64;
                                (k * s.ln() - lgamma(k + 1.0), Complex64::new(1.0, 0.0))
                            } else {
                                (f64::NEG_INFINITY, Complex64::new(1.0, 0.0))
                            }
                        },
                        r_max,
                    )?)
                }
                FunctionSpec::Exp { .. } => None,
            };
            let g = match (method, &series, spec) {
                (MethodArg::Coefficients, Some(t), _) => order_type_from_coefficients(t.log_abs_coefficients())?,
                (MethodArg::MaxModulus, Some(t), _) => estimate_order_type(t, &radii, &GrowthConfig::default())?,
                (_, None, FunctionSpec::Exp { s, r }) => estimate_order_type(
                    &LogModulusFn(move |z: Complex64| s * z.powu(r).re),
                    &radii,
                    &GrowthConfig::default(),
                )?,
                _ => unreachable!("every function spec yields a series or a closed modulus"),
            };
            if let Some(path) = csv {
                write_file(path, |w| g.write_csv(w))?;
            }
            let text = growth_text(&g);
            ("growth", serde_json::to_value(&g).map_err(json_err)?, text)
        }
        Command::Density { seq, radii, csv } => {
            let seq = parse_sequence(seq, cli.seed)?.build(DEFAULT_COUNT)?;
            let radii = match radii {
                Some(r) => parse_radii(r)?,
                None => default_density_radii(&seq),
            };
            let d = estimate_density(&seq, &radii)?;
            if let Some(path) = csv {
                write_file(path, |w| seq.write_csv(w))?;
            }
            let text = format!(
                "t = {:.6} +- {:.2e}, delta = {:.6} +- {:.2e} ({} points, reach {:.4})",
                d.t,
                d.residual,
                d.delta,
                d.delta_residual,
                seq.len(),
                seq.reach()
            );
            ("density", json!({ "density": d, "nominal_density": seq.nominal_density() }), text)
        }
        Command::Moments { family, n_max } => {
            let fam = parse_family(family)?;
            let cfg = MomentConfig {
                n_max: (*n_max).max(MomentConfig::default().n_max),
                ..MomentConfig::default()
            };
            let mut rows = Vec::new();
            let mut text = String::from("n  computed  expected  relative error");
            for n in 0..=*n_max {
                let m = fam.moment_check(n, &cfg)?;
                text.push_str(&format!(
                    "\n{}  {:.12e}  {:.12e}  {:.3e}",
                    m.n, m.computed, m.expected, m.relative_error
                ));
                rows.push(json!({
                    "n": m.n,
                    "computed": m.computed,
                    "expected": m.expected,
                    "relative_error": m.relative_error,
                    "error_estimate": m.quad.error_estimate,
                    "evaluations": m.quad.evaluations,
                }));
            }
            ("moments", json!({ "family": fam.name(), "moments": rows }), text)
        }
        Command::Gram {
            family,
            seq,
            fock_dim,
            tail_tol,
            csv,
        } => {
            let fam = parse_family(family)?;
            let seq = parse_sequence(seq, cli.seed)?.build(60)?;
            let g = gram_matrix(&fam, seq.points(), DEFAULT_MAX_GRAM_POINTS)?;
            let ev = g.eigenvalues();
            let cfg = RankConfig {
                max_tail_mass: *tail_tol,
                ..RankConfig::default()
            };
            let d = finite_rank_diagnostic(&fam, seq.points(), *fock_dim, &cfg)?;
            if let Some(path) = csv {
                write_file(path, |w| d.write_csv(w))?;
            }
            let text = format!(
                "{} points: Gram eigenvalues in [{:.3e}, {:.3e}]{}; numerical rank {} of {} at fock_dim {}; residual vector norm {:.3e}",
                seq.len(),
                ev[0],
                ev[ev.len() - 1],
                if g.has_duplicates() { " (duplicate points)" } else { "" },
                d.numerical_rank,
                seq.len().min(*fock_dim),
                fock_dim,
                d.residual_vector_norm
            );
            (
                "gram",
                json!({
                    "points": seq.len(),
                    "duplicates": g.duplicates,
                    "gram_eigenvalues": ev,
                    "rank": d,
                }),
                text,
            )
        }
    };
    let config = serde_json::to_value(cli).map_err(json_err)?;
    let json = json!({
        "metadata": {
            "tool": "genbargmann",
            "version": env!("CARGO_PKG_VERSION"),
            "command": name,
            "config": config,
            "seed": cli.seed,
            "phase_rng": crate::sequences::PHASE_RNG,
        },
        "result": result,
    });
    Ok(Report { json, text })
}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidInput(e.to_string())
}

/// Parses `args`, runs the command, prints and writes outputs; returns the exit code.
pub fn main_with_args<I, T, O, E>(args: I, stdout: &mut O, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let msg = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(msg.as_bytes())
            } else {
                stderr.write_all(msg.as_bytes())
            };
            return code;
        }
    };
    match run(&cli) {
        Ok(rep) => {
            let body = rep.json_string();
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &body) {
                    let _ = writeln!(stderr, "error: {e}");
                    return 2;
                }
            }
            let _ = if cli.json {
                stdout.write_all(body.as_bytes())
            } else {
                writeln!(stdout, "{}", rep.text)
            };
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn position(e: Error) -> usize {
        match e {
            Error::Parse { position, .. } => position,
            other => panic!("not a parse error: {other}"),
        }
    }

    #[test]
    fn family_grammar() {
        assert_eq!(parse_family("rho2").unwrap().name(), "rho2");
        let ml = parse_family("ml:2:1.5").unwrap();
        assert!(ml.name().starts_with("mittag_leffler"));
        assert_eq!(position(parse_family("ml:2:x").unwrap_err()), 5);
        assert_eq!(position(parse_family("ml:2").unwrap_err()), 4);
        assert_eq!(position(parse_family("gauss").unwrap_err()), 0);
        assert!(parse_family("custom:/nonexistent/file").unwrap_err().is_input_error());
    }

    #[test]
    fn sequence_grammar() {
        let s = parse_sequence("radial:t=1,delta=2,phase=random", 9).unwrap();
        assert_eq!(s.kind, Some(SequenceKind::Radial { t: 1.0, delta: 2.0 }));
        assert_eq!(s.phase, PhasePolicy::SeededRandom { seed: 9 });
        let s = parse_sequence("lattice:A=1.5,count=100,phase=random,seed=3", 0).unwrap();
        assert_eq!(s.count, Some(100));
        assert_eq!(s.phase, PhasePolicy::SeededRandom { seed: 3 });
        assert_eq!(position(parse_sequence("lattice:A=x", 0).unwrap_err()), 10);
        assert_eq!(position(parse_sequence("radial:t=1,d=2", 0).unwrap_err()), 11);
        assert_eq!(position(parse_sequence("line:l=1,,count=3", 0).unwrap_err()), 9);
        assert!(parse_sequence("spiral:a=1", 0).is_err());
        assert!(parse_sequence("radial:t=1", 0).is_err());
    }

    #[test]
    fn radii_and_function_grammar() {
        let r = parse_radii("1:100:5").unwrap();
        assert_eq!(r.len(), 5);
        assert!((r[4] - 100.0).abs() < 1e-9);
        assert_eq!(position(parse_radii("1:1e2:x").unwrap_err()), 6);
        assert!(parse_radii("5:1:4").is_err());
        assert_eq!(parse_function("exp:s=2,r=1").unwrap(), FunctionSpec::Exp { s: 2.0, r: 1 });
        assert_eq!(
            parse_function("coherent:re=1,im=-2").unwrap(),
            FunctionSpec::Coherent(Complex64::new(1.0, -2.0))
        );
        assert!(parse_function("exp:s=2").is_err());
    }

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(std::iter::once("genbargmann").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn families_and_exit_codes() {
        let (code, out, _) = run_args(&["families", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let list = v["result"].as_array().unwrap();
        assert_eq!(list.len(), 4);
        assert_eq!(list[0]["name"], "factorial");
        assert_eq!(list[0]["a"], 2.0);
        assert_eq!(list[0]["b"], 0.5);
        assert_eq!(v["metadata"]["command"], "families");
        let (code, _, err) = run_args(&["families", "ml:2"]);
        assert_eq!(code, 2);
        assert!(err.contains("position"));
        let (code, _, _) = run_args(&["classify", "--family", "factorial", "--seq", "lattice:A=3.14159265"]);
        assert_eq!(code, 1);
    }
}
