//! Dataset files, result documents and plot data.
//!
//! Numbers are read as decimal text so the exact backend sees the value
//! that was written, not its nearest double. Result documents print every
//! real with 17 significant digits, which round-trips any `f64`.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::value::RawValue;

use crate::cpwl::{Cpwl, Knot};
use crate::dataset::{Dataset1D, DatasetND};
use crate::error::{Error, Result};
use crate::multivariate::{Method, NeuronND, ReconstructedNet};
use crate::scalar::{Rational, Scalar};

// ---------------------------------------------------------------------------
// Datasets

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

/// Rows as read, in file order, with numbers kept as text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTable {
    pub dim: usize,
    pub rows: Vec<(Vec<String>, String)>,
}

impl RawTable {
    /// Sorted univariate view. Fails unless `dim == 1`.
    pub fn to_1d<T: Scalar>(&self) -> Result<Dataset1D<T>> {
        if self.dim != 1 {
            return Err(Error::InvalidDataset(format!("expected 1 input column, found {}", self.dim)));
        }
        let points = self
            .rows
            .iter()
            .map(|(x, y)| Ok((T::parse_decimal(&x[0])?, T::parse_decimal(y)?)))
            .collect::<Result<Vec<_>>>()?;
        Dataset1D::new(points)
    }

    /// Multivariate view in file order.
    pub fn to_nd(&self) -> Result<DatasetND> {
        let mut xs = Vec::with_capacity(self.rows.len());
        let mut ys = Vec::with_capacity(self.rows.len());
        for (x, y) in &self.rows {
            xs.push(x.iter().map(|v| f64::parse_decimal(v)).collect::<Result<Vec<_>>>()?);
            ys.push(f64::parse_decimal(y)?);
        }
        DatasetND::new(xs, ys)
    }

    /// CSV text that [`parse_csv`] reads back to the same table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.dim == 1 {
            out.push_str("x,y\n");
        } else {
            let cols: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
            let _ = writeln!(out, "{},y", cols.join(","));
        }
        for (x, y) in &self.rows {
            let _ = writeln!(out, "{},{y}", x.join(","));
        }
        out
    }
}

fn check_header(header: &[String]) -> Result<usize> {
    let bad = || Error::Format(format!("header must be `x,y` or `x1,..,xd,y`, got `{}`", header.join(",")));
    let (last, inputs) = header.split_last().ok_or_else(bad)?;
    if last != "y" || inputs.is_empty() {
        return Err(bad());
    }
    let ok = if inputs.len() == 1 {
        inputs[0] == "x" || inputs[0] == "x1"
    } else {
        inputs.iter().enumerate().all(|(i, h)| *h == format!("x{}", i + 1))
    };
    if !ok {
        return Err(bad());
    }
    Ok(inputs.len())
}

pub fn parse_csv(text: &str) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> =
        reader.headers().map_err(|e| Error::Format(e.to_string()))?.iter().map(str::to_string).collect();
    let dim = check_header(&header)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                Error::Format(format!("row {} has {len} fields, expected {expected_len}", i + 1))
            }
            _ => Error::Format(e.to_string()),
        })?;
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        let (y, x) = fields.split_last().expect("header checked");
        rows.push((x.to_vec(), y.clone()));
    }
    Ok(RawTable { dim, rows })
}

#[derive(Deserialize)]
struct JsonPoints<'a> {
    #[serde(borrow)]
    points: Vec<(&'a RawValue, &'a RawValue)>,
}

fn number_text(v: &RawValue, row: usize) -> Result<String> {
    let s = v.get().trim();
    if s.starts_with(['[', '{', '"']) || s == "null" || s == "true" || s == "false" {
        return Err(Error::Format(format!("point {row}: expected a number, got {s}")));
    }
    Ok(s.to_string())
}

/// Reads `{"points": [[[x1, .., xd], y], ..]}`; a bare number is accepted
/// for `x` when `d = 1`.
pub fn parse_json(text: &str) -> Result<RawTable> {
    let doc: JsonPoints = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let mut rows = Vec::with_capacity(doc.points.len());
    let mut dim = None;
    for (i, (x, y)) in doc.points.iter().enumerate() {
        let xs: Vec<String> = if x.get().trim_start().starts_with('[') {
            let parts: Vec<&RawValue> = serde_json::from_str(x.get()).map_err(|e| Error::Format(e.to_string()))?;
            parts.iter().map(|v| number_text(v, i + 1)).collect::<Result<_>>()?
        } else {
            vec![number_text(x, i + 1)?]
        };
        match dim {
            None => dim = Some(xs.len()),
            Some(d) if d != xs.len() => {
                return Err(Error::Format(format!("point {} has {} coordinates, expected {d}", i + 1, xs.len())))
            }
            _ => {}
        }
        rows.push((xs, number_text(y, i + 1)?));
    }
    let dim = dim.ok_or_else(|| Error::InvalidDataset("no points".into()))?;
    if dim == 0 {
        return Err(Error::InvalidDataset("input dimension must be at least 1".into()));
    }
    Ok(RawTable { dim, rows })
}

/// Reads a table, picking the format from the extension when not given.
pub fn read_table(path: &Path, format: Option<DataFormat>) -> Result<RawTable> {
    let text = std::fs::read_to_string(path)?;
    match format.unwrap_or_else(|| DataFormat::from_path(path)) {
        DataFormat::Csv => parse_csv(&text),
        DataFormat::Json => parse_json(&text),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadedDataset {
    /// Exact values, sorted by abscissa.
    OneD(Dataset1D<Rational>),
    Nd(DatasetND),
}

/// Validated dataset: univariate when there is one input column.
pub fn load_dataset(path: &Path, format: Option<DataFormat>) -> Result<LoadedDataset> {
    let table = read_table(path, format)?;
    if table.dim == 1 {
        table.to_1d().map(LoadedDataset::OneD)
    } else {
        table.to_nd().map(LoadedDataset::Nd)
    }
}

// ---------------------------------------------------------------------------
// Number formatting

/// `v` with 17 significant digits, positional for moderate exponents.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if (0..16).contains(&exp) {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{sign}{int}.{frac}")
    } else if (-5..0).contains(&exp) {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        format!("{sign}{mantissa}e{exp}")
    }
}

/// Pretty printer that writes floats through [`format_real`].
struct RealFormatter(PrettyFormatter<'static>);

impl Formatter for RealFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, format!("non-finite number {value}")));
        }
        w.write_all(format_real(value).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-digit reals and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, RealFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}

// ---------------------------------------------------------------------------
// Result documents

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: String,
    pub command: String,
    pub problem: ProblemDoc,
    pub solution: Option<SolutionDoc>,
    pub pstar: Option<PstarDoc>,
    pub provenance: Provenance,
    /// Command-specific extras (oracle statistics, verification checks).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub dimension: usize,
    pub n: usize,
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalize_bias: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostDoc {
    pub p: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub function: FunctionDoc,
    pub costs: Vec<CostDoc>,
    pub l0: usize,
    pub l1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

impl SolutionDoc {
    pub fn cost(&self, p: f64) -> Option<f64> {
        self.costs.iter().find(|c| c.p == p).map(|c| c.value)
    }
}

/// Anchor point and slope left of every knot. Exact strings are present
/// when the solver ran in rational arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorDoc {
    pub x: f64,
    pub y: f64,
    pub slope: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotDoc {
    pub at: f64,
    pub change: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<[String; 2]>,
}

/// One nonzero coordinate of a lifted solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub index: usize,
    /// Position in the pattern list, and the pattern itself as `0`/`1` bits.
    pub pattern: usize,
    pub bits: String,
    pub side: crate::multivariate::Side,
    pub coord: usize,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitDoc {
    /// Input weights followed by the bias.
    pub w: Vec<f64>,
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionDoc {
    /// Univariate piecewise-linear function.
    Cpwl { anchor: AnchorDoc, knots: Vec<KnotDoc> },
    /// Sparse point of the lifted problem and the network built from it.
    Lifted { dim: usize, method: Method, caveat: bool, support: Vec<SupportEntry>, neurons: Vec<NeuronND> },
    /// Plain network without skip connection.
    Network { dim: usize, units: Vec<UnitDoc> },
}

impl FunctionDoc {
    pub fn from_cpwl<T: Scalar>(f: &Cpwl<T>) -> Self {
        let anchor = AnchorDoc {
            x: f.anchor_x().to_f64(),
            y: f.anchor_y().to_f64(),
            slope: f.base_slope().to_f64(),
            exact: f.anchor_x().exact_string().map(|x| {
                [x, f.anchor_y().exact_string().unwrap_or_default(), f.base_slope().exact_string().unwrap_or_default()]
            }),
        };
        let knots = f
            .knots()
            .iter()
            .map(|k| KnotDoc {
                at: k.at.to_f64(),
                change: k.change.to_f64(),
                exact: k.at.exact_string().map(|a| [a, k.change.exact_string().unwrap_or_default()]),
            })
            .collect();
        FunctionDoc::Cpwl { anchor, knots }
    }

    /// The univariate function in `T`, from exact strings when present.
    pub fn to_cpwl<T: Scalar>(&self) -> Result<Cpwl<T>> {
        let FunctionDoc::Cpwl { anchor, knots } = self else {
            return Err(Error::Format("result does not hold a univariate function".into()));
        };
        let num = |v: f64, exact: Option<&String>| match exact {
            Some(s) => T::parse_decimal(s),
            None => T::from_f64(v),
        };
        let ex = anchor.exact.as_ref();
        let knots = knots
            .iter()
            .map(|k| {
                let ex = k.exact.as_ref();
                Ok(Knot { at: num(k.at, ex.map(|e| &e[0]))?, change: num(k.change, ex.map(|e| &e[1]))? })
            })
            .collect::<Result<Vec<_>>>()?;
        Cpwl::new(
            num(anchor.x, ex.map(|e| &e[0]))?,
            num(anchor.y, ex.map(|e| &e[1]))?,
            num(anchor.slope, ex.map(|e| &e[2]))?,
            knots,
        )
    }

    /// Whether exact strings are present.
    pub fn is_exact(&self) -> bool {
        match self {
            FunctionDoc::Cpwl { anchor, .. } => anchor.exact.is_some(),
            FunctionDoc::Lifted { support, .. } => support.iter().all(|s| s.exact.is_some()),
            FunctionDoc::Network { .. } => false,
        }
    }

    /// Any network form as a [`ReconstructedNet`], with its input dimension.
    pub fn to_net(&self) -> Option<(usize, ReconstructedNet)> {
        match self {
            FunctionDoc::Cpwl { .. } => None,
            FunctionDoc::Lifted { dim, neurons, .. } => Some((*dim, ReconstructedNet { neurons: neurons.clone() })),
            FunctionDoc::Network { dim, units } => {
                let neurons = units
                    .iter()
                    .map(|u| NeuronND {
                        w: u.w.clone(),
                        v: u.v,
                        pattern: 0,
                        side: if u.v < 0.0 { crate::multivariate::Side::Omega } else { crate::multivariate::Side::Nu },
                    })
                    .collect();
                Some((*dim, ReconstructedNet { neurons }))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PstarDoc {
    pub value: f64,
    pub method: String,
    /// True when `value` is a heuristic estimate rather than a computed threshold.
    pub estimate: bool,
    pub diagnostics: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub solver: String,
    pub version: String,
    pub arithmetic: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Input row of each sorted point, for univariate data read out of order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_order: Option<Vec<usize>>,
    /// Only recorded on request, so documents stay reproducible by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Provenance {
    pub fn new(solver: &str, arithmetic: &str) -> Self {
        Self {
            solver: solver.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            arithmetic: arithmetic.to_string(),
            seed: None,
            input_order: None,
            wall_time_s: None,
        }
    }

    /// Records the sort permutation unless the input was already sorted.
    pub fn with_order<T: Scalar>(mut self, d: &Dataset1D<T>) -> Self {
        if !d.was_sorted() {
            self.input_order = Some(d.order().to_vec());
        }
        self
    }
}

impl ResultDocument {
    pub fn new(command: &str, problem: ProblemDoc, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            problem,
            solution: None,
            pstar: None,
            provenance,
            details: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema version {:?}", doc.schema_version)));
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `(p, Σ|c_k|^p)` for each `p`, plus the derived `l0`, `l1` and Lipschitz
/// constant.
pub fn cpwl_solution<T: Scalar>(f: &Cpwl<T>, ps: &[f64]) -> Result<SolutionDoc> {
    let costs = ps.iter().map(|&p| Ok(CostDoc { p, value: f.vp_cost(p)? })).collect::<Result<_>>()?;
    Ok(SolutionDoc {
        function: FunctionDoc::from_cpwl(f),
        costs,
        l0: f.num_knots(),
        l1: f.vp_cost(1.0)?,
        lipschitz: Some(f.lipschitz()),
    })
}

// ---------------------------------------------------------------------------
// Plot data

/// Something that can be sampled for plotting.
#[derive(Clone, Copy, Debug)]
pub enum Plottable<'a> {
    Cpwl(&'a Cpwl<f64>),
    Net { dim: usize, net: &'a ReconstructedNet },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlotData {
    /// `(x, f(x))` in increasing `x`.
    Curve(Vec<(f64, f64)>),
    /// `(x1, x2, f)` row-major over the grid, `x1` outer.
    Grid(Vec<(f64, f64, f64)>),
}

impl PlotData {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            PlotData::Curve(rows) => {
                out.push_str("x,f\n");
                for (x, f) in rows {
                    let _ = writeln!(out, "{},{}", format_real(*x), format_real(*f));
                }
            }
            PlotData::Grid(rows) => {
                out.push_str("x1,x2,f\n");
                for (a, b, f) in rows {
                    let _ = writeln!(out, "{},{},{}", format_real(*a), format_real(*b), format_real(*f));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        match self {
            PlotData::Curve(r) => r.len(),
            PlotData::Grid(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn linspace(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let step = (hi - lo) / (samples - 1) as f64;
    (0..samples).map(|i| if i + 1 == samples { hi } else { lo + step * i as f64 }).collect()
}

fn curve(lo: f64, hi: f64, samples: usize, kinks: impl Iterator<Item = f64>, f: impl Fn(f64) -> f64) -> PlotData {
    let mut xs = linspace(lo, hi, samples);
    xs.extend(kinks.filter(|k| *k >= lo && *k <= hi));
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    xs.dedup();
    PlotData::Curve(xs.into_iter().map(|x| (x, f(x))).collect())
}

/// Samples `f` on `samples` evenly spaced points of `range` (per axis in
/// 2D). Univariate output also contains every kink inside the range.
pub fn emit_plot_data(f: Plottable<'_>, range: (f64, f64), samples: usize) -> Result<PlotData> {
    let (lo, hi) = range;
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid range [{lo}, {hi}]")));
    }
    match f {
        Plottable::Cpwl(g) => Ok(curve(lo, hi, samples, g.knots().iter().map(|k| k.at), |x| g.eval(&x))),
        Plottable::Net { dim: 1, net } => {
            let kinks = net.neurons.iter().filter(|n| n.w[0] != 0.0).map(|n| -n.w[1] / n.w[0]);
            Ok(curve(lo, hi, samples, kinks, |x| net.eval(&[x])))
        }
        Plottable::Net { dim: 2, net } => {
            let axis = linspace(lo, hi, samples);
            let mut rows = Vec::with_capacity(samples * samples);
            for &a in &axis {
                for &b in &axis {
                    rows.push((a, b, net.eval(&[a, b])));
                }
            }
            Ok(PlotData::Grid(rows))
        }
        Plottable::Net { dim, .. } => Err(Error::Domain(format!("cannot plot a function of {dim} inputs"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multivariate::Side;

    #[test]
    fn csv_1d_sorted_with_order() {
        let t = parse_csv("x,y\n1,1\n0,0\n").unwrap();
        let d: Dataset1D<Rational> = t.to_1d().unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.order(), &[1, 0]);
        let prov = Provenance::new("s", "exact").with_order(&d);
        assert_eq!(prov.input_order, Some(vec![1, 0]));
    }

    #[test]
    fn csv_keeps_decimals_exact() {
        let t = parse_csv("x,y\n0,0.05\n1,0.1\n").unwrap();
        let d: Dataset1D<Rational> = t.to_1d().unwrap();
        assert_eq!(d.y(0).exact_string().unwrap(), "1/20");
    }

    #[test]
    fn duplicate_and_ragged_rows() {
        let dup = parse_csv("x,y\n0,0\n1,1\n0,2\n").unwrap().to_1d::<f64>().unwrap_err();
        assert!(matches!(dup, Error::DuplicateAbscissa { first: 1, second: 3, .. }), "{dup}");
        let ragged = parse_csv("x1,x2,y\n0,0,1\n1,1\n").unwrap_err();
        assert!(matches!(ragged, Error::Format(_)), "{ragged}");
        assert!(parse_csv("a,b\n0,0\n").is_err());
    }

    #[test]
    fn json_points() {
        let t = parse_json(r#"{"points": [[[0, 1], 2], [[1, 0.5], -1]]}"#).unwrap();
        assert_eq!(t.dim, 2);
        assert_eq!(t.rows[1], (vec!["1".to_string(), "0.5".to_string()], "-1".to_string()));
        let s = parse_json(r#"{"points": [[0, 1], [2, 0.1]]}"#).unwrap();
        assert_eq!(s.dim, 1);
        assert!(parse_json(r#"{"points": [[[0, 1], 2], [[1], 0]]}"#).is_err());
        assert!(parse_json(r#"{"points": [[[0, "a"], 2]]}"#).is_err());
    }

    #[test]
    fn table_csv_roundtrip() {
        let t = parse_csv("x1,x2,y\n0,1.5,2\n-1,2e-3,0\n").unwrap();
        assert_eq!(parse_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(1.0), "1.0000000000000000");
        assert_eq!(format_real(-0.0), "0.0");
        assert_eq!(format_real(2f64.sqrt() * 2.0), "2.8284271247461903");
        assert_eq!(format_real(1e-3), "0.0010000000000000000");
        assert_eq!(format_real(1.5e20), "1.5000000000000000e20");
        assert_eq!(format_real(-2.5e-9), "-2.5000000000000001e-9");
        for v in [0.1, 1.0 / 3.0, 6.02e23, -7.5e-300, 123456.789, 1e16] {
            assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
        }
    }

    fn sample_doc() -> ResultDocument {
        let f = Cpwl::new(
            Rational::from_i64(0),
            Rational::from_i64(0),
            Rational::from_i64(1),
            vec![
                Knot { at: Rational::from_i64(1), change: Rational::from_i64(-2) },
                Knot { at: Rational::from_i64(2), change: Rational::from_i64(2) },
            ],
        )
        .unwrap();
        let problem =
            ProblemDoc { dimension: 1, n: 4, p: vec![0.5], radius: None, penalize_bias: None, patterns: None };
        let mut doc = ResultDocument::new("solve1d", problem, Provenance::new("univariate", "exact"));
        doc.solution = Some(cpwl_solution(&f, &[0.5, 0.1]).unwrap());
        doc.details = Some(serde_json::json!({"ties": [], "unique": true, "third": 1.0 / 3.0}));
        doc
    }

    #[test]
    fn document_roundtrip() {
        let doc = sample_doc();
        let text = doc.to_json().unwrap();
        assert!(text.contains("2.8284271247461903"), "{text}");
        assert!(text.contains("\"-2/1\""), "{text}");
        let back = ResultDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json().unwrap(), text);
        let f: Cpwl<Rational> = back.solution.unwrap().function.to_cpwl().unwrap();
        assert_eq!(f.num_knots(), 2);
    }

    #[test]
    fn lifted_roundtrip() {
        let problem = ProblemDoc {
            dimension: 2,
            n: 1,
            p: vec![0.5],
            radius: Some(10.0),
            penalize_bias: Some(true),
            patterns: Some("all".into()),
        };
        let mut doc = ResultDocument::new("solve-nd", problem, Provenance::new("support_enum", "exact"));
        doc.solution = Some(SolutionDoc {
            function: FunctionDoc::Lifted {
                dim: 2,
                method: Method::SupportEnum,
                caveat: false,
                support: vec![SupportEntry {
                    index: 2,
                    pattern: 0,
                    bits: "1".into(),
                    side: Side::Nu,
                    coord: 2,
                    value: 0.1,
                    exact: Some("1/10".into()),
                }],
                neurons: vec![NeuronND { w: vec![0.0, 0.0, 0.1], v: 1.0, pattern: 0, side: Side::Nu }],
            },
            costs: vec![CostDoc { p: 0.5, value: 0.1f64.sqrt() }],
            l0: 1,
            l1: 0.1,
            lipschitz: None,
        });
        let text = doc.to_json().unwrap();
        assert_eq!(ResultDocument::from_json(&text).unwrap(), doc);
    }

    #[test]
    fn rejects_other_schema() {
        let text = sample_doc().to_json().unwrap().replace("\"schema_version\": \"1\"", "\"schema_version\": \"2\"");
        assert!(ResultDocument::from_json(&text).is_err());
    }

    #[test]
    fn plot_includes_knots() {
        let f = sample_doc().solution.unwrap().function.to_cpwl::<f64>().unwrap();
        let PlotData::Curve(rows) = emit_plot_data(Plottable::Cpwl(&f), (-1.0, 4.0), 6).unwrap() else {
            panic!("expected a curve");
        };
        // The grid already hits both knots.
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[2], (1.0, 1.0));
        assert_eq!(rows[3], (2.0, 0.0));
        let PlotData::Curve(rows) = emit_plot_data(Plottable::Cpwl(&f), (-1.0, 4.0), 5).unwrap() else {
            panic!("expected a curve");
        };
        assert_eq!(rows.len(), 7);
        assert!(rows.contains(&(1.0, 1.0)) && rows.contains(&(2.0, 0.0)));
    }

    #[test]
    fn plot_networks() {
        let empty = ReconstructedNet::default();
        let d = emit_plot_data(Plottable::Net { dim: 1, net: &empty }, (0.0, 1.0), 3).unwrap();
        assert_eq!(d, PlotData::Curve(vec![(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)]));
        let net =
            ReconstructedNet { neurons: vec![NeuronND { w: vec![1.0, 1.0, 0.0], v: 1.0, pattern: 0, side: Side::Nu }] };
        let g = emit_plot_data(Plottable::Net { dim: 2, net: &net }, (-1.0, 1.0), 4).unwrap();
        assert_eq!(g.len(), 16);
        assert!(g.to_csv().starts_with("x1,x2,f\n"));
        assert!(emit_plot_data(Plottable::Net { dim: 3, net: &net }, (0.0, 1.0), 2).is_err());
        assert!(emit_plot_data(Plottable::Net { dim: 2, net: &net }, (0.0, 1.0), 1).is_err());
    }
}
