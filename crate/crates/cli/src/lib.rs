//! Command-line front end: argument parsing, dispatch to the core modules,
//! and JSON reports in which every exact rational is written as `"p/q"`.
//!
//! [`run`] does all the work and returns the text and exit code instead of
//! printing, so the binary is a thin wrapper and tests can call it in
//! process.

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use nadyn_core::berkspace::{chart, TypeIIPoint};
use nadyn_core::crucial::{
    all_slopes, hyp_res, hyp_res_direct_profile, min_locus, min_locus_from, ord_res, semistability,
    slope_measured, slope_rhs, SlopeReport,
};
use nadyn_core::degeneration::{
    default_start, degeneration_report, Hypothesis, SamplerOptions,
};
use nadyn_core::equidist::{depth_sequence, DirectionMeasure, Match, Prediction};
use nadyn_core::parse::{
    format_map, parse_direction, parse_map, parse_point, parse_residue_poly,
};
use nadyn_core::redux::{coeff_reduction, conjugate, intrinsic_data, min_ord, RationalMapK, Tilde};
use nadyn_core::respoly::{DirectionClass, HomogeneousForm};
use nadyn_core::scalars::{format_rational, parse_rational, Rational, ResScalar};
use nadyn_core::Error;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(
    name = "nadyn",
    version,
    about = "Reductions, depths, resultant loci and equidistribution checks for rational maps over Q(t)"
)]
pub struct Cli {
    /// Emit JSON (always on; accepted for explicitness).
    #[arg(long, global = true)]
    pub json: bool,
    /// Indent the JSON report for reading.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coefficient reduction of the map in the chart of a point.
    Reduce(MapPoint),
    /// Depth divisor (squarefree decomposition of the common factor).
    Depths(MapPoint),
    /// Intrinsic reduction data: local degree, image direction, fixed pieces.
    Intrinsic(MapPoint),
    /// ordRes and hypRes at a point.
    Ordres(MapPoint),
    /// hypRes at a point, optionally also by path integration.
    Hypres(HypresArgs),
    /// Directional slopes of hypRes, predicted and measured.
    Slope(SlopeArgs),
    /// Minimum of hypRes by steepest descent.
    Minlocus(MinlocusArgs),
    /// Semistability verdict at a point.
    Semistable(MapPoint),
    /// Normalized depth measures of iterates and their predicted limit.
    Equidist(EquidistArgs),
    /// Complex sampling check of a one-parameter degeneration.
    Degcheck(DegcheckArgs),
}

#[derive(Args, Debug)]
pub struct MapPoint {
    /// Rational map in z, e.g. "(t*z^2+1)/t".
    #[arg(long)]
    pub map: String,
    /// Type II point: "gauss" or "a=<scalar>;s=<rational>".
    #[arg(long, default_value = "gauss")]
    pub point: String,
}

#[derive(Args, Debug)]
pub struct HypresArgs {
    #[command(flatten)]
    pub at: MapPoint,
    /// Also integrate the slope along the path from the Gauss point.
    #[arg(long)]
    pub direct: bool,
}

#[derive(Args, Debug)]
pub struct SlopeArgs {
    #[command(flatten)]
    pub at: MapPoint,
    /// Single direction: "inf", "res=<rational>", "factor=<poly>" or
    /// "toward:<point>". Without it every direction of positive depth is
    /// reported.
    #[arg(long)]
    pub direction: Option<String>,
}

#[derive(Args, Debug)]
pub struct MinlocusArgs {
    #[arg(long)]
    pub map: String,
    /// Starting point of the descent.
    #[arg(long, default_value = "gauss")]
    pub start: String,
}

#[derive(Args, Debug)]
pub struct EquidistArgs {
    #[command(flatten)]
    pub at: MapPoint,
    /// Number of iterates; defaults to the largest n ≤ 4 with d^n ≤ 16.
    #[arg(long)]
    pub nmax: Option<u32>,
}

#[derive(Args, Debug)]
pub struct DegcheckArgs {
    #[arg(long)]
    pub map: String,
    /// Comma-separated specialization values, e.g. "1e-3,1e-4".
    #[arg(long = "t", value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub t: Vec<String>,
    /// Pullback depth.
    #[arg(long, default_value_t = 12)]
    pub n: u32,
    /// Chordal radius of the target neighbourhoods.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// "auto", or a JSON list of atoms such as
    /// '[{"class":"inf","mass":"1/1"}]'.
    #[arg(long, default_value = "auto")]
    pub hypothesis: String,
    /// Start point of the backward orbit as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
}

/// Text and exit status of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

type Outcome2<T> = std::result::Result<T, Failure>;

/// Parses the arguments (including the program name) and runs the verb.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let render = |v: &Value| {
        let mut s = if cli.pretty {
            serde_json::to_string_pretty(v).expect("JSON values always serialize")
        } else {
            v.to_string()
        };
        s.push('\n');
        s
    };
    match execute(&cli.command) {
        Ok(report) => Outcome {
            code: EXIT_OK,
            stdout: render(&report),
            stderr: String::new(),
        },
        Err(Failure::Domain(e)) => Outcome {
            code: EXIT_DOMAIN,
            stdout: render(&json!({ "error": e.to_string() })),
            stderr: String::new(),
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn execute(command: &Command) -> Outcome2<Value> {
    match command {
        Command::Reduce(a) => reduce_report(a),
        Command::Depths(a) => depths_report(a),
        Command::Intrinsic(a) => intrinsic_report(a),
        Command::Ordres(a) => ordres_report(a),
        Command::Hypres(a) => hypres_report(a),
        Command::Slope(a) => slope_report(a),
        Command::Minlocus(a) => minlocus_report(a),
        Command::Semistable(a) => semistable_report(a),
        Command::Equidist(a) => equidist_report(a),
        Command::Degcheck(a) => degcheck_report(a),
    }
}

fn inputs(a: &MapPoint) -> Outcome2<(RationalMapK, TypeIIPoint)> {
    Ok((parse_map(&a.map)?, parse_point(&a.point)?))
}

fn q(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn residue_json(r: &ResScalar) -> Value {
    match r {
        ResScalar::Finite(v) => q(v),
        ResScalar::Infinity => Value::String("inf".into()),
    }
}

fn class_fields(c: &DirectionClass) -> Map<String, Value> {
    let mut m = Map::new();
    match c {
        DirectionClass::Infinity => {
            m.insert("class".into(), "inf".into());
        }
        DirectionClass::Finite(v) => {
            m.insert("class".into(), "finite".into());
            m.insert("value".into(), q(v));
        }
        DirectionClass::Factor(p) => {
            m.insert("class".into(), "factor".into());
            m.insert("poly".into(), p.display_in("z").into());
        }
    }
    m
}

fn class_json(c: &DirectionClass) -> Value {
    Value::Object(class_fields(c))
}

fn atom_json(c: &DirectionClass, mass: &Rational) -> Value {
    let mut m = class_fields(c);
    m.insert("mass".into(), q(mass));
    Value::Object(m)
}

fn point_json(xi: &TypeIIPoint) -> Value {
    json!({ "a": xi.center().to_string(), "s": format_rational(xi.exponent()) })
}

fn form_json(h: &HomogeneousForm) -> Value {
    json!({
        "coeffs": h.coeffs().iter().map(q).collect::<Vec<_>>(),
        "text": h.display(),
    })
}

fn measure_json(m: &DirectionMeasure) -> Value {
    json!({
        "atoms": m.atoms.iter().map(|(c, w)| atom_json(c, w)).collect::<Vec<_>>(),
        "point_mass": q(&m.point_mass),
    })
}

/// Rounds to 12 significant digits; non-finite values become `null`.
fn float12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

fn reduce_report(a: &MapPoint) -> Outcome2<Value> {
    let (phi, xi) = inputs(a)?;
    let psi = conjugate(&chart(&xi)?, &phi);
    let red = coeff_reduction(&psi);
    let tilde = match &red.tilde {
        Tilde::Map { num, den } => json!({ "kind": "map", "num": form_json(num), "den": form_json(den) }),
        Tilde::Constant(c) => json!({ "kind": "constant", "value": residue_json(c) }),
    };
    Ok(json!({
        "map": format_map(&phi),
        "point": point_json(&xi),
        "chart_map": format_map(&psi),
        "min_ord": q(&min_ord(&psi)),
        "reduced_num": form_json(&red.reduced_num),
        "reduced_den": form_json(&red.reduced_den),
        "h": form_json(&red.h),
        "tilde": tilde,
        "tilde_degree": red.tilde_degree(),
    }))
}

fn depths_report(a: &MapPoint) -> Outcome2<Value> {
    let (phi, xi) = inputs(a)?;
    let ir = intrinsic_data(&phi, &xi)?;
    let depths: Vec<Value> = ir
        .depths
        .classes()
        .into_iter()
        .map(|(c, depth)| {
            let mut m = class_fields(&c);
            m.insert("depth".into(), depth.into());
            m.insert("mass".into(), (c.degree() * depth).into());
            Value::Object(m)
        })
        .collect();
    Ok(json!({
        "point": point_json(&xi),
        "h": form_json(&ir.reduction.h),
        "depths": depths,
        "inf_mult": ir.depths.inf_mult(),
        "total": ir.depths.total(),
    }))
}

fn intrinsic_report(a: &MapPoint) -> Outcome2<Value> {
    let (phi, xi) = inputs(a)?;
    let ir = intrinsic_data(&phi, &xi)?;
    let tangent = ir
        .tangent()
        .map(|(n, d)| json!({ "num": form_json(n), "den": form_json(d) }));
    let pieces: Vec<Value> = ir
        .pieces()
        .iter()
        .map(|p| {
            let mut m = class_fields(&p.class);
            m.insert("depth".into(), p.depth.into());
            m.insert("fixed".into(), p.fixed.into());
            Value::Object(m)
        })
        .collect();
    Ok(json!({
        "point": point_json(&xi),
        "degree": ir.degree,
        "fixes_point": ir.fixes_point(),
        "local_degree": ir.local_degree(),
        "image_direction": ir.image_direction().as_ref().map(class_json),
        "totally_invariant": ir.totally_invariant(),
        "tangent": tangent,
        "fixed_point_form": ir.fixed_point_form().as_ref().map(form_json),
        "pieces": pieces,
    }))
}

fn ordres_report(a: &MapPoint) -> Outcome2<Value> {
    let (phi, xi) = inputs(a)?;
    Ok(json!({
        "point": point_json(&xi),
        "ord_res": q(&ord_res(&phi, &xi)?),
        "hyp_res": q(&hyp_res(&phi, &xi)?),
    }))
}

fn hypres_report(a: &HypresArgs) -> Outcome2<Value> {
    let (phi, xi) = inputs(&a.at)?;
    let mut out = json!({
        "point": point_json(&xi),
        "hyp_res": q(&hyp_res(&phi, &xi)?),
    });
    if a.direct {
        let e = hyp_res_direct_profile(&phi, &xi)?;
        let integrand: Vec<Value> = e
            .integrand
            .iter()
            .map(|(from, to, m)| json!({ "from": q(from), "to": q(to), "m": m }))
            .collect();
        out["direct"] = json!({
            "value": q(&e.value),
            "integrand": integrand,
            "wedge_position": q(&e.wedge_position),
        });
    }
    Ok(out)
}

/// The measured slope, or `None` where finite differences are unavailable.
fn measured(phi: &RationalMapK, xi: &TypeIIPoint, class: &DirectionClass) -> Outcome2<Option<Rational>> {
    if !class.is_rational() {
        return Ok(None);
    }
    match slope_measured(phi, xi, class) {
        Ok(v) => Ok(Some(v)),
        Err(Error::PiecewiseBoundaryUnresolved) | Err(Error::IrrationalDirection) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn slope_json(s: &SlopeReport, measured: Option<Rational>) -> Value {
    let mut m = class_fields(&s.class);
    m.insert("dep".into(), s.dep.into());
    m.insert("fixed".into(), s.fixed.into());
    m.insert("rhs".into(), q(&s.rhs));
    m.insert("measured".into(), measured.as_ref().map_or(Value::Null, q));
    Value::Object(m)
}

fn slopes_json(phi: &RationalMapK, xi: &TypeIIPoint, reports: &[SlopeReport]) -> Outcome2<Vec<Value>> {
    reports
        .iter()
        .map(|s| Ok(slope_json(s, measured(phi, xi, &s.class)?)))
        .collect()
}

fn slope_report(a: &SlopeArgs) -> Outcome2<Value> {
    let (phi, xi) = inputs(&a.at)?;
    let reports = match &a.direction {
        Some(text) => vec![slope_rhs(&phi, &xi, &parse_direction(text)?.resolve(&xi)?)?],
        None => all_slopes(&phi, &xi)?,
    };
    Ok(json!({
        "point": point_json(&xi),
        "slopes": slopes_json(&phi, &xi, &reports)?,
    }))
}

fn minlocus_report(a: &MinlocusArgs) -> Outcome2<Value> {
    let phi = parse_map(&a.map)?;
    let start = parse_point(&a.start)?;
    let r = if start.is_gauss() {
        min_locus(&phi)?
    } else {
        min_locus_from(&phi, &start)?
    };
    let trail: Vec<Value> = r
        .trail
        .iter()
        .map(|s| {
            json!({
                "from": point_json(&s.from),
                "direction": class_json(&s.class),
                "slope": q(&s.slope),
                "length": q(&s.length),
            })
        })
        .collect();
    Ok(json!({
        "minimizer": point_json(&r.minimizer),
        "ord_res": q(&r.min_ord_res),
        "hyp_res": q(&r.min_hyp_res),
        "verdict": r.verdict.as_str(),
        "unique": r.unique,
        "flat_directions": r.flat_directions.iter().map(class_json).collect::<Vec<_>>(),
        "trail": trail,
    }))
}

fn semistable_report(a: &MapPoint) -> Outcome2<Value> {
    let (phi, xi) = inputs(a)?;
    let verdict = semistability(&phi, &xi)?;
    let reports = all_slopes(&phi, &xi)?;
    Ok(json!({
        "point": point_json(&xi),
        "verdict": verdict.as_str(),
        "slopes": slopes_json(&phi, &xi, &reports)?,
    }))
}

/// Largest `n ≤ 4` with `d^n ≤ 16`, and at least 1.
fn default_levels(d: usize) -> u32 {
    (1..=4u32)
        .rev()
        .find(|&n| (d as u64).checked_pow(n).is_some_and(|v| v <= 16))
        .unwrap_or(1)
}

fn equidist_report(a: &EquidistArgs) -> Outcome2<Value> {
    let (phi, xi) = inputs(&a.at)?;
    let n_max = a.nmax.unwrap_or_else(|| default_levels(phi.degree()));
    let r = depth_sequence(&phi, &xi, n_max)?;
    let levels: Vec<Value> = r
        .levels
        .iter()
        .map(|l| {
            let mut m = Map::new();
            m.insert("n".into(), l.n.into());
            if let Value::Object(rest) = measure_json(&l.measure) {
                m.extend(rest);
            }
            Value::Object(m)
        })
        .collect();
    let predicted = match &r.predicted {
        Prediction::Atom(m) => measure_json(m),
        Prediction::Unknown => Value::Null,
    };
    let matches = match r.matches {
        Match::Yes => Value::Bool(true),
        Match::No => Value::Bool(false),
        Match::NotApplicable => Value::String("n/a".into()),
    };
    Ok(json!({
        "point": point_json(&xi),
        "levels": levels,
        "tv": r.tv_steps.iter().map(q).collect::<Vec<_>>(),
        "predicted": predicted,
        "match": matches,
    }))
}

fn parse_float(text: &str, what: &str) -> Outcome2<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Failure::Usage(format!("{what}: '{text}' is not a number")))
}

fn parse_hypothesis(text: &str) -> Outcome2<Hypothesis> {
    if text.trim() == "auto" {
        return Ok(Hypothesis::Auto);
    }
    let bad = |msg: &str| Failure::Usage(format!("hypothesis: {msg}"));
    let value: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
    let (atoms, point_mass) = match &value {
        Value::Array(list) => (list.clone(), None),
        Value::Object(m) => (
            m.get("atoms")
                .and_then(Value::as_array)
                .cloned()
                .ok_or_else(|| bad("expected an \"atoms\" list"))?,
            m.get("point_mass").and_then(Value::as_str).map(str::to_string),
        ),
        _ => return Err(bad("expected a list of atoms")),
    };
    let field = |atom: &Value, key: &str| -> Outcome2<String> {
        atom.get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("atom without \"{key}\"")))
    };
    let rational = |s: &str| parse_rational(s).ok_or_else(|| bad(&format!("bad rational '{s}'")));
    let mut parsed = Vec::with_capacity(atoms.len());
    for atom in &atoms {
        let class = match field(atom, "class")?.as_str() {
            "inf" => DirectionClass::Infinity,
            "finite" => DirectionClass::Finite(rational(&field(atom, "value")?)?),
            "factor" => DirectionClass::from_poly(&parse_residue_poly(&field(atom, "poly")?)?)?,
            other => return Err(bad(&format!("unknown class '{other}'"))),
        };
        parsed.push((class, rational(&field(atom, "mass")?)?));
    }
    Ok(Hypothesis::Measure(DirectionMeasure {
        atoms: parsed,
        point_mass: match point_mass {
            Some(s) => rational(&s)?,
            None => Rational::from_integer(0.into()),
        },
    }))
}

fn degcheck_report(a: &DegcheckArgs) -> Outcome2<Value> {
    let phi = parse_map(&a.map)?;
    let t_values = a
        .t
        .iter()
        .map(|s| parse_float(s, "t").map(|x| Complex64::new(x, 0.0)))
        .collect::<Outcome2<Vec<_>>>()?;
    let z0 = match &a.z0 {
        None => default_start(),
        Some(text) => {
            let (re, im) = text.split_once(',').unwrap_or((text, "0"));
            Complex64::new(parse_float(re, "z0")?, parse_float(im, "z0")?)
        }
    };
    let hypothesis = parse_hypothesis(&a.hypothesis)?;
    let options = SamplerOptions {
        n: a.n,
        eps: a.eps,
        z0,
        ..SamplerOptions::default()
    };
    let r = degeneration_report(&phi, &t_values, &hypothesis, &options)?;
    let predicted_mass = |label: &str| {
        r.predicted
            .iter()
            .find(|(c, _)| c.to_string() == label)
            .map(|(_, m)| format_rational(m))
    };
    let per_t: Vec<Value> = r
        .per_t
        .iter()
        .map(|level| {
            let masses: Vec<Value> = level
                .atoms
                .iter()
                .map(|atom| {
                    json!({
                        "target": atom.label,
                        "mass": float12(atom.mass),
                        "predicted": predicted_mass(&atom.label),
                        "radius": float12(atom.radius),
                    })
                })
                .collect();
            json!({
                "t": float12(level.t.re),
                "sample_size": level.sample_size,
                "masses": masses,
                "mass_beyond_10": float12(level.mass_beyond_10),
            })
        })
        .collect();
    Ok(json!({
        "map": format_map(&phi),
        "hypothesis_source": r.hypothesis_source.to_string(),
        "predicted": r.predicted.iter().map(|(c, m)| atom_json(c, m)).collect::<Vec<_>>(),
        "per_t": per_t,
        "max_discrepancy": float12(r.max_discrepancy),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rounding_keeps_twelve_digits() {
        assert_eq!(float12(0.1234567890123456), json!(0.123456789012));
        assert_eq!(float12(1.0), json!(1.0));
        assert_eq!(float12(f64::NAN), Value::Null);
    }

    #[test]
    fn default_level_counts() {
        assert_eq!(default_levels(2), 4);
        assert_eq!(default_levels(3), 2);
        assert_eq!(default_levels(4), 2);
        assert_eq!(default_levels(5), 1);
    }

    #[test]
    fn hypothesis_literals() {
        assert_eq!(parse_hypothesis("auto").unwrap(), Hypothesis::Auto);
        let h = parse_hypothesis(r#"[{"class":"inf","mass":"1/1"}]"#).unwrap();
        assert_eq!(
            h,
            Hypothesis::Measure(DirectionMeasure::dirac(DirectionClass::Infinity))
        );
        assert!(matches!(parse_hypothesis("[{\"class\":\"x\"}]"), Err(Failure::Usage(_))));
    }
}
