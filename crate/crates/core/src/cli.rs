//! Command-line front end.
//!
//! Exit codes: `0` success, `1` validation or usage error, `2` numerical
//! failure. Results go to `--out` (or stdout); diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datasets::{self, DatasetKind};
use crate::encoding::{EncodingId, EncodingSpec};
use crate::error::{Error, Result};
use crate::kernel::{combine, gram, GramMatrix, GramMethod, KernelWeights};
use crate::pauli::{coefficient_grid, coefficient_grids, pauli_index, pauli_label};
use crate::screening::minimum_accuracy;
use crate::svm::{cross_validate, train, LabeledDataset};

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "qfmap", version, about = "Quantum feature-map kernels: simulate, screen, train")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Generate a benchmark dataset as CSV
    Gen(GenArgs),
    /// Write Pauli-coefficient grids as CSV (and optionally PGM)
    Heatmap(HeatmapArgs),
    /// Minimum-accuracy screening report, one row per encoding
    Screen(ScreenArgs),
    /// Cross-validated SVM training with a single or combined kernel
    Train(TrainArgs),
    /// Dump a Gram matrix as CSV
    Kernel(KernelArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Circle,
    Exp,
    Moon,
    Xor,
}

impl From<KindArg> for DatasetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Circle => DatasetKind::Circle,
            KindArg::Exp => DatasetKind::Exp,
            KindArg::Moon => DatasetKind::Moon,
            KindArg::Xor => DatasetKind::Xor,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    Ef1,
    Ef2,
    Ef3,
    Ef4,
    Ef5,
    Custom,
}

impl From<EncodingArg> for EncodingId {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Ef1 => EncodingId::Ef1,
            EncodingArg::Ef2 => EncodingId::Ef2,
            EncodingArg::Ef3 => EncodingId::Ef3,
            EncodingArg::Ef4 => EncodingId::Ef4,
            EncodingArg::Ef5 => EncodingId::Ef5,
            EncodingArg::Custom => EncodingId::Custom,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Pauli,
    Shots,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Csv,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct GenArgs {
    pub kind: KindArg,
    /// Number of points (even)
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Encoding selection shared by every command that builds feature maps.
#[derive(Args, Debug, Clone, PartialEq, Default)]
pub struct EncodingArgs {
    /// Encoding id; repeatable. `custom` refers to the --custom-* expressions
    #[arg(long = "encoding", value_enum)]
    pub encodings: Vec<EncodingArg>,
    /// Custom φ₁₂ expression over x1, x2 (sin cos exp abs ln pi + - * / ^)
    #[arg(long, allow_hyphen_values = true)]
    pub custom_phi12: Option<String>,
    /// Custom φ₁ expression [default: x1]
    #[arg(long, allow_hyphen_values = true)]
    pub custom_phi1: Option<String>,
    /// Custom φ₂ expression [default: x2]
    #[arg(long, allow_hyphen_values = true)]
    pub custom_phi2: Option<String>,
}

/// Dataset source: a CSV file or a generator.
#[derive(Args, Debug, Clone, PartialEq)]
pub struct DataArgs {
    /// Dataset CSV (header x1,x2,label)
    #[arg(long, conflicts_with = "kind")]
    pub data: Option<PathBuf>,
    /// Generate the dataset instead of reading it
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Generated dataset size
    #[arg(long = "n-points", default_value_t = 100)]
    pub n_points: usize,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct KernelMethodArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    /// Seed for shot sampling and fold shuffling
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated kernel weights for combined kernels [default: all 1]
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub encoding: EncodingArgs,
    /// Pauli label (e.g. ZZ) or `all`
    #[arg(long, default_value = "all")]
    pub axis: String,
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    /// Output prefix; files are named <prefix>_<LABEL>.csv
    #[arg(long, default_value = "heatmap")]
    pub out: PathBuf,
    /// Also write 8-bit PGM images
    #[arg(long)]
    pub pgm: bool,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    /// Print every axis, not just one summary row per encoding
    #[arg(long)]
    pub axes: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    #[command(flatten)]
    pub kernel: KernelMethodArgs,
    /// Soft-margin penalty
    #[arg(long = "c", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Write the model trained on the full dataset here
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct KernelArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    #[command(flatten)]
    pub kernel: KernelMethodArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Canonical argument vector; parsing it yields `self` again.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec!["qfmap".to_string()];
        let push = |a: &mut Vec<String>, k: &str, v: String| {
            a.push(format!("--{k}"));
            a.push(v);
        };
        let value = |v: &dyn ValueEnumName| v.name();
        match &self.command {
            Command::Gen(g) => {
                a.push("gen".into());
                a.push(value(&g.kind));
                push(&mut a, "n", g.n.to_string());
                push(&mut a, "seed", g.seed.to_string());
                if let Some(o) = &g.out {
                    push(&mut a, "out", o.display().to_string());
                }
            }
            Command::Heatmap(h) => {
                a.push("heatmap".into());
                encoding_args(&mut a, &h.encoding);
                push(&mut a, "axis", h.axis.clone());
                push(&mut a, "resolution", h.resolution.to_string());
                push(&mut a, "lo", h.lo.to_string());
                push(&mut a, "hi", h.hi.to_string());
                push(&mut a, "out", h.out.display().to_string());
                if h.pgm {
                    a.push("--pgm".into());
                }
            }
            Command::Screen(s) => {
                a.push("screen".into());
                data_args(&mut a, &s.data);
                encoding_args(&mut a, &s.encoding);
                if s.axes {
                    a.push("--axes".into());
                }
                push(&mut a, "format", value(&s.format));
                if let Some(o) = &s.out {
                    push(&mut a, "out", o.display().to_string());
                }
            }
            Command::Train(t) => {
                a.push("train".into());
                data_args(&mut a, &t.data);
                encoding_args(&mut a, &t.encoding);
                method_args(&mut a, &t.kernel);
                push(&mut a, "c", t.c.to_string());
                push(&mut a, "tolerance", t.tolerance.to_string());
                push(&mut a, "folds", t.folds.to_string());
                if let Some(m) = &t.model_out {
                    push(&mut a, "model-out", m.display().to_string());
                }
                push(&mut a, "format", value(&t.format));
                if let Some(o) = &t.out {
                    push(&mut a, "out", o.display().to_string());
                }
            }
            Command::Kernel(k) => {
                a.push("kernel".into());
                data_args(&mut a, &k.data);
                encoding_args(&mut a, &k.encoding);
                method_args(&mut a, &k.kernel);
                if let Some(o) = &k.out {
                    push(&mut a, "out", o.display().to_string());
                }
            }
        }
        a
    }
}

trait ValueEnumName {
    fn name(&self) -> String;
}

impl<V: ValueEnum> ValueEnumName for V {
    fn name(&self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

fn encoding_args(a: &mut Vec<String>, e: &EncodingArgs) {
    for id in &e.encodings {
        a.push("--encoding".into());
        a.push(id.name());
    }
    for (k, v) in [
        ("custom-phi12", &e.custom_phi12),
        ("custom-phi1", &e.custom_phi1),
        ("custom-phi2", &e.custom_phi2),
    ] {
        if let Some(v) = v {
            a.push(format!("--{k}={v}"));
        }
    }
}

fn data_args(a: &mut Vec<String>, d: &DataArgs) {
    if let Some(p) = &d.data {
        a.push("--data".into());
        a.push(p.display().to_string());
    }
    if let Some(k) = &d.kind {
        a.push("--kind".into());
        a.push(k.name());
    }
    a.push(format!("--n-points={}", d.n_points));
    a.push(format!("--data-seed={}", d.data_seed));
}

fn method_args(a: &mut Vec<String>, m: &KernelMethodArgs) {
    a.push(format!("--method={}", m.method.name()));
    a.push(format!("--shots={}", m.shots));
    a.push(format!("--seed={}", m.seed));
    if !m.weights.is_empty() {
        let w: Vec<String> = m.weights.iter().map(|w| w.to_string()).collect();
        a.push(format!("--weights={}", w.join(",")));
    }
}

/// Parses arguments and runs the selected command, returning the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// `2` for numerical failures, `1` for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::NonFiniteEncoding { .. } | Error::SamplingExhausted(_) => 2,
        Error::PairFailed { source, .. } => exit_code(source),
        _ => 1,
    }
}

pub fn execute(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Heatmap(a) => cmd_heatmap(a),
        Command::Screen(a) => cmd_screen(a),
        Command::Train(a) => cmd_train(a),
        Command::Kernel(a) => cmd_kernel(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn resolve_encodings(e: &EncodingArgs, default: &[EncodingId]) -> Result<Vec<(String, EncodingSpec<f64>)>> {
    let mut ids: Vec<EncodingId> = e.encodings.iter().map(|&a| a.into()).collect();
    if ids.is_empty() {
        ids = if e.custom_phi12.is_some() {
            vec![EncodingId::Custom]
        } else {
            default.to_vec()
        };
    }
    ids.into_iter()
        .map(|id| {
            if id == EncodingId::Custom {
                let phi12 = e.custom_phi12.as_deref().ok_or_else(|| {
                    Error::InvalidArgument("--encoding custom requires --custom-phi12".into())
                })?;
                let spec =
                    EncodingSpec::from_expressions(e.custom_phi1.as_deref(), e.custom_phi2.as_deref(), phi12)?;
                Ok(("custom".to_string(), spec))
            } else {
                Ok((id.to_string(), EncodingSpec::builtin(id)?))
            }
        })
        .collect()
}

fn load_dataset(d: &DataArgs) -> Result<LabeledDataset<f64>> {
    match (&d.data, d.kind) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            datasets::from_csv(&text)
        }
        (None, Some(kind)) => datasets::generate(kind.into(), d.n_points, d.data_seed),
        (None, None) => Err(Error::InvalidArgument("one of --data or --kind is required".into())),
    }
}

pub fn cmd_gen(a: &GenArgs) -> Result<()> {
    let ds = datasets::generate::<f64>(a.kind.into(), a.n, a.seed)?;
    emit(a.out.as_deref(), &datasets::to_csv(&ds))
}

pub fn cmd_heatmap(a: &HeatmapArgs) -> Result<()> {
    let encodings = resolve_encodings(&a.encoding, &[EncodingId::Ef1])?;
    if encodings.len() != 1 {
        return Err(Error::InvalidArgument("heatmap takes exactly one encoding".into()));
    }
    let spec = &encodings[0].1;
    let range = (a.lo, a.hi);
    let grids = if a.axis.eq_ignore_ascii_case("all") {
        coefficient_grids(spec, range, a.resolution)?
            .into_iter()
            .enumerate()
            .collect::<Vec<_>>()
    } else {
        let idx = pauli_index(&a.axis)?;
        if a.axis.len() != 2 {
            return Err(Error::InvalidArgument(format!("axis {:?} is not a two-qubit label", a.axis)));
        }
        vec![(idx, coefficient_grid(spec, idx, range, a.resolution)?)]
    };
    let prefix = a.out.display().to_string();
    for (idx, grid) in grids {
        let label = pauli_label(idx, 2);
        fs::write(format!("{prefix}_{label}.csv"), grid.to_csv())?;
        if a.pgm {
            fs::write(format!("{prefix}_{label}.pgm"), grid.to_pgm())?;
        }
    }
    Ok(())
}

pub fn cmd_screen(a: &ScreenArgs) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    if ds.is_empty() {
        return Err(Error::InvalidArgument("dataset is empty".into()));
    }
    let encodings = resolve_encodings(&a.encoding, &EncodingId::BUILTIN)?;
    let mut text = String::new();
    match a.format {
        FormatArg::Csv => text.push_str("encoding,minimum_accuracy,best_axis,threshold,orientation\n"),
        FormatArg::Text => text.push_str("encoding  minimum_accuracy  best_axis  threshold\n"),
    }
    let mut details = String::new();
    for (name, spec) in &encodings {
        let r = minimum_accuracy(&ds, spec)?;
        let b = r.best();
        let label = pauli_label(r.best_axis, 2);
        match a.format {
            FormatArg::Csv => text.push_str(&format!(
                "{name},{},{label},{},{}\n",
                r.minimum_accuracy,
                b.threshold,
                b.orientation.as_str()
            )),
            FormatArg::Text => text.push_str(&format!(
                "{name:<8}  {:<16.4}  {label:<9}  {:.8}\n",
                r.minimum_accuracy, b.threshold
            )),
        }
        if a.axes {
            details.push_str(&format!("\n# {name}\n"));
            match a.format {
                FormatArg::Csv => details.push_str(&r.to_csv()),
                FormatArg::Text => details.push_str(&format!("{r}\n")),
            }
        }
    }
    text.push_str(&details);
    emit(a.out.as_deref(), &text)
}

fn method_of(m: &KernelMethodArgs) -> Result<GramMethod<f64>> {
    Ok(match m.method {
        MethodArg::Exact => GramMethod::Exact,
        MethodArg::Pauli => GramMethod::Pauli,
        MethodArg::Shots => {
            if m.shots == 0 {
                return Err(Error::ZeroShots);
            }
            GramMethod::Shots {
                shots: m.shots,
                seed: m.seed,
            }
        }
    })
}

/// Builds one Gram matrix per encoding, combining them when there are several.
fn build_kernel(
    encodings: &[(String, EncodingSpec<f64>)],
    m: &KernelMethodArgs,
    points: &[[f64; 2]],
) -> Result<GramMatrix<f64>> {
    let method = method_of(m)?;
    if encodings.len() == 1 && m.weights.is_empty() {
        return gram(&encodings[0].1, points, method);
    }
    let weights = if m.weights.is_empty() {
        KernelWeights::equal(encodings.len())
    } else {
        KernelWeights::new(m.weights.clone())?
    };
    let grams = encodings
        .iter()
        .enumerate()
        .map(|(k, (_, spec))| {
            // decorrelate shot noise between constituent kernels
            let method = match &method {
                GramMethod::Shots { shots, seed } => GramMethod::Shots {
                    shots: *shots,
                    seed: seed.wrapping_add(k as u64),
                },
                other => other.clone(),
            };
            gram(spec, points, method)
        })
        .collect::<Result<Vec<_>>>()?;
    combine(&grams, &weights)
}

fn kernel_description(encodings: &[(String, EncodingSpec<f64>)], m: &KernelMethodArgs) -> String {
    let names: Vec<&str> = encodings.iter().map(|(n, _)| n.as_str()).collect();
    let mut s = format!("encodings={} method={}", names.join("+"), m.method.name());
    if m.method == MethodArg::Shots {
        s.push_str(&format!(" shots={} seed={}", m.shots, m.seed));
    }
    if !m.weights.is_empty() {
        let w: Vec<String> = m.weights.iter().map(|w| w.to_string()).collect();
        s.push_str(&format!(" weights={}", w.join(";")));
    }
    s
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    let encodings = resolve_encodings(&a.encoding, &[EncodingId::Ef1])?;
    let report = cross_validate(
        &ds,
        |pts| build_kernel(&encodings, &a.kernel, pts),
        a.folds,
        a.c,
        a.tolerance,
        a.kernel.seed,
    )?;
    let desc = kernel_description(&encodings, &a.kernel);
    let text = match a.format {
        FormatArg::Text => format!("{desc}\n{report}\n"),
        FormatArg::Csv => report.to_csv(),
    };
    if let Some(path) = &a.model_out {
        let g = build_kernel(&encodings, &a.kernel, ds.points())?;
        let model = train(&g, ds.labels(), a.c, a.tolerance)?
            .with_points(ds.points().to_vec())
            .with_kernel(desc);
        fs::write(path, model.to_text())?;
    }
    emit(a.out.as_deref(), &text)
}

pub fn cmd_kernel(a: &KernelArgs) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    let encodings = resolve_encodings(&a.encoding, &[EncodingId::Ef1])?;
    let g = build_kernel(&encodings, &a.kernel, ds.points())?;
    emit(a.out.as_deref(), &g.to_csv())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(args).unwrap()
    }

    #[test]
    fn defaults_are_documented_values() {
        let cfg = parse(&["qfmap", "train", "--kind", "moon"]);
        let Command::Train(t) = cfg.command else { panic!() };
        assert_eq!(t.kernel.shots, 10_000);
        assert_eq!(t.kernel.seed, 0);
        assert_eq!(t.c, 1.0);
        assert_eq!(t.tolerance, 1e-3);
        assert_eq!(t.folds, 5);
        assert_eq!(t.data.n_points, 100);
        let Command::Heatmap(h) = parse(&["qfmap", "heatmap"]).command else { panic!() };
        assert_eq!(h.resolution, 101);
    }

    #[test]
    fn config_round_trips_through_args() {
        let cases: Vec<Vec<&str>> = vec![
            vec!["qfmap", "gen", "circle", "--n", "40", "--seed", "7"],
            vec!["qfmap", "heatmap", "--encoding", "ef3", "--axis", "ZZ", "--resolution", "5", "--lo", "-2", "--pgm"],
            vec!["qfmap", "screen", "--kind", "xor", "--encoding", "ef1", "--encoding", "ef4", "--format", "csv"],
            vec![
                "qfmap", "train", "--kind", "moon", "--encoding", "ef3", "--encoding", "ef1", "--weights", "1.5,0.5",
                "--method", "shots", "--shots", "500", "--c", "10", "--model-out", "m.txt",
            ],
            vec!["qfmap", "kernel", "--data", "d.csv", "--custom-phi12", "-pi * x1 * x2", "--method", "pauli"],
        ];
        for args in cases {
            let cfg = parse(&args);
            let again = parse(&cfg.to_args().iter().map(String::as_str).collect::<Vec<_>>());
            assert_eq!(cfg, again, "{args:?}");
        }
    }

    #[test]
    fn invalid_method_is_usage_error() {
        assert!(RunConfig::try_parse_from(["qfmap", "kernel", "--kind", "xor", "--method", "magic"]).is_err());
        assert_eq!(run(["qfmap", "kernel", "--kind", "xor", "--method", "magic"]), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::OddPointCount), 1);
        assert_eq!(exit_code(&Error::Numerical("x".into())), 2);
        let nested = Error::PairFailed {
            i: 0,
            j: 1,
            source: Box::new(Error::NonFiniteEncoding { function: "phi12", x1: 0.0, x2: 0.0 }),
        };
        assert_eq!(exit_code(&nested), 2);
    }

    #[test]
    fn custom_requires_expression() {
        let e = EncodingArgs {
            encodings: vec![EncodingArg::Custom],
            ..Default::default()
        };
        assert!(resolve_encodings(&e, &[EncodingId::Ef1]).is_err());
        let e = EncodingArgs {
            custom_phi12: Some("pi*x1*x2".into()),
            ..Default::default()
        };
        let r = resolve_encodings(&e, &[EncodingId::Ef1]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, "custom");
    }
}
