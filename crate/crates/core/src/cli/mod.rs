//! Command-line front end. [`run`] parses arguments, runs one subcommand
//! and returns the exit code with the text destined for stdout/stderr, so
//! it can be driven in-process.

mod gps;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use gps::{parse_series, parse_series_file, serialize_series};
pub use report::{real, Report, Table};

use crate::error::Error;
use crate::geometry::{
    build_local_parametrization, check_sign_constancy, covering_fraction, exact_critical_points_1d, fiber_cut_equations,
    refine_maps_by_rank, sample_target, series_sign, validity_radius, verify_fiber_cut, BasicSetDescriptor, ParamOptions,
    ParamTarget, Quadrant, SeriesMap,
};
use crate::rational;
use crate::series::{GenSeries, Normality};
use crate::trees::{monomialize, star_monomialize, verify_tree, BranchReport, TreeFile};
use crate::vlab::{self, BreakpointSystem};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "qmono", version, about = "Generalized power series, monomializing trees, local parametrizations and jet-space checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Report file (tree file for `normalize`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-depth", default_value_t = 32)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a (star-)monomializing tree and verify every branch.
    Normalize {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        star: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check a tree file against its recorded inputs.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Signs of the leaf series on every quadrant of every branch.
    Signs {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        star: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Local parametrization of a polydisk or basic set compatible with
    /// the input series.
    Parametrize {
        #[arg(long, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Equation `f = 0` of a basic set.
        #[arg(long)]
        equation: Option<PathBuf>,
        /// Inequalities `g > 0` of a basic set.
        #[arg(long, num_args = 1..)]
        positive: Vec<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long = "cover-samples", default_value_t = 10_000)]
        cover_samples: usize,
        #[arg(long = "min-cover", default_value_t = 0.99)]
        min_cover: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Rank refinement and fiber-cutting equations of the map whose
    /// components are the inputs, embedded as its graph.
    Fibercut {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long = "m-split")]
        m_split: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// `r′` as a fraction of the radius.
        #[arg(long = "r-scale", default_value_t = 0.8)]
        r_scale: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Piecewise-polynomial jet laboratory.
    Vlab {
        #[command(subcommand)]
        command: VlabCommand,
    },
}

#[derive(Debug, Clone, Args)]
pub struct JetArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Piece degree; defaults to `(n+2)(p+1) − 1`.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum VlabCommand {
    /// Jet tuple of a random element of `W` at random points.
    Jet(JetArgs),
    /// Codimension and dimension of `W`.
    Wbasis(JetArgs),
    /// Closed-form gradients of `Φ` against central differences.
    Gradcheck(JetArgs),
    /// Grid tuples where the jet of a random element of `W` lies in the
    /// common zero set of the input polynomials.
    Avoid {
        #[command(flatten)]
        jet: JetArgs,
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
    },
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Fail {
    Usage(String),
    Check(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Check(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Fail>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut stdout = String::new();
    match dispatch(&cli.command, &mut stdout) {
        Ok(passed) => Outcome {
            code: if passed { 0 } else { 1 },
            stdout,
            stderr: String::new(),
        },
        Err(Fail::Usage(m)) => Outcome {
            code: 2,
            stdout,
            stderr: format!("error: {m}\n"),
        },
        Err(Fail::Check(m)) => Outcome {
            code: 1,
            stdout,
            stderr: format!("error: {m}\n"),
        },
    }
}

fn check_common(c: &Common) -> Res<()> {
    if c.tol.is_nan() || c.tol <= 0.0 {
        return Err(Fail::Usage(format!("--tol must be positive, got {}", c.tol)));
    }
    Ok(())
}

fn read_series(path: &Path) -> Res<GenSeries> {
    parse_series_file(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn read_all(paths: &[PathBuf]) -> Res<Vec<GenSeries>> {
    let out: Vec<GenSeries> = paths.iter().map(|p| read_series(p)).collect::<Res<_>>()?;
    if let Some(f) = out.first() {
        if let Some((k, _)) = out.iter().enumerate().find(|(_, g)| g.signature() != f.signature()) {
            return Err(Fail::Usage(format!("{} has signature {}, expected {}", paths[k].display(), out[k].signature(), f.signature())));
        }
    }
    Ok(out)
}

fn paths(ps: &[PathBuf]) -> String {
    if ps.is_empty() {
        return "-".into();
    }
    ps.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",")
}

/// Writes the report to `--out` or appends it to `stdout`.
fn emit(report: &Report, out: &Option<PathBuf>, stdout: &mut String) -> Res<()> {
    let text = report.to_text();
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail::Usage(format!("{}: {e}", p.display()))),
        None => {
            stdout.push_str(&text);
            Ok(())
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut String) -> Res<bool> {
    match cmd {
        Command::Normalize { input, star, common } => normalize(input, *star, common, stdout),
        Command::Verify { input, common } => verify(input, common, stdout),
        Command::Signs { input, star, common } => signs(input, *star, common, stdout),
        Command::Parametrize {
            input,
            equation,
            positive,
            samples,
            cover_samples,
            min_cover,
            common,
        } => parametrize(input, equation.as_deref(), positive, (*samples, *cover_samples, *min_cover), common, stdout),
        Command::Fibercut {
            input,
            m_split,
            samples,
            r_scale,
            common,
        } => fibercut(input, *m_split, *samples, *r_scale, common, stdout),
        Command::Vlab { command } => match command {
            VlabCommand::Jet(a) => vlab_jet(a, stdout),
            VlabCommand::Wbasis(a) => vlab_wbasis(a, stdout),
            VlabCommand::Gradcheck(a) => vlab_gradcheck(a, stdout),
            VlabCommand::Avoid { jet, input } => vlab_avoid(jet, input, stdout),
        },
    }
}

fn branch_table(reports: &[BranchReport]) -> Table {
    let mut t = Table::new(&["branch", "chain", "statuses", "ledger"]);
    for (b, r) in reports.iter().enumerate() {
        let statuses: Vec<&str> = r.statuses.iter().map(|s| s.label()).collect();
        let ledger: Vec<String> = r
            .ledger
            .iter()
            .map(|e| format!("{}:{}={}", e.step, r.chain.steps()[e.step].source().var_name(e.variable), e.status.label()))
            .collect();
        t.row(vec![
            b.to_string(),
            r.chain.to_string(),
            statuses.join(","),
            if ledger.is_empty() { "-".into() } else { ledger.join(",") },
        ]);
    }
    t
}

fn build_tree(inputs: &[GenSeries], star: bool, max_depth: usize) -> Res<crate::trees::AdmissibleTree> {
    if star {
        Ok(star_monomialize(inputs, max_depth)?)
    } else {
        Ok(monomialize(inputs, max_depth)?)
    }
}

fn normalize(input: &[PathBuf], star: bool, c: &Common, stdout: &mut String) -> Res<bool> {
    check_common(c)?;
    let inputs = read_all(input)?;
    let tree = build_tree(&inputs, star, c.max_depth)?;
    let reports = verify_tree(&tree, &inputs)?;
    let mut r = Report::new("normalize");
    r.config("input", paths(input));
    r.config("star", star);
    r.config("max_depth", c.max_depth);
    r.config("tree_out", c.out.as_ref().map_or("-".into(), |p| p.display().to_string()));
    r.line(format!("leaves {}", tree.leaf_count()));
    r.line(format!("depth {}", tree.depth()));
    r.table(branch_table(&reports));
    r.line("verification PASS");
    if let Some(p) = &c.out {
        let file = TreeFile {
            star,
            max_depth: c.max_depth,
            inputs,
            tree,
        };
        std::fs::write(p, file.to_text()).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?;
    }
    stdout.push_str(&r.to_text());
    Ok(true)
}

fn verify(input: &Path, c: &Common, stdout: &mut String) -> Res<bool> {
    check_common(c)?;
    let text = std::fs::read_to_string(input).map_err(|e| Fail::Usage(format!("{}: {e}", input.display())))?;
    let mut r = Report::new("verify");
    r.config("input", input.display());
    let outcome = TreeFile::parse(&text).and_then(|f| {
        let reports = verify_tree(&f.tree, &f.inputs)?;
        Ok((f, reports))
    });
    let passed = match outcome {
        Ok((f, reports)) => {
            r.line(format!("star {}", f.star));
            r.line(format!("leaves {}", f.tree.leaf_count()));
            r.table(branch_table(&reports));
            r.line("verification PASS");
            true
        }
        Err(e) => {
            r.line(format!("verification FAIL: {e}"));
            false
        }
    };
    emit(&r, &c.out, stdout)?;
    Ok(passed)
}

fn signs(input: &[PathBuf], star: bool, c: &Common, stdout: &mut String) -> Res<bool> {
    check_common(c)?;
    let inputs = read_all(input)?;
    let tree = build_tree(&inputs, star, c.max_depth)?;
    let mut r = Report::new("signs");
    r.config("input", paths(input));
    r.config("star", star);
    r.config("max_depth", c.max_depth);
    let mut t = Table::new(&["branch", "series", "chain", "radius", "quadrant", "sign"]);
    for (b, (chain, snaps)) in tree.branches().into_iter().enumerate() {
        let sig = chain.source();
        for (k, f) in snaps.iter().enumerate() {
            let radius = match f.normal_decompose() {
                Normality::Normal(nd) => validity_radius(&nd, sig.radius()),
                Normality::Zero => sig.radius().to_vec(),
                Normality::NotNormal(a, b) => return Err(Fail::Check(format!("leaf series {f} is not normal: {a}, {b}"))),
            };
            let rad: Vec<String> = radius.iter().map(rational::format).collect();
            for q in Quadrant::all(sig) {
                let q = q.with_radius(radius.clone())?;
                let s = series_sign(f, &q)?;
                t.row(vec![b.to_string(), (k + 1).to_string(), chain.to_string(), rad.join(","), q.to_string(), sign(s)]);
            }
        }
    }
    r.table(t);
    emit(&r, &c.out, stdout)?;
    Ok(true)
}

fn parametrize(
    input: &[PathBuf],
    equation: Option<&Path>,
    positive: &[PathBuf],
    (samples, cover_samples, min_cover): (usize, usize, f64),
    c: &Common,
    stdout: &mut String,
) -> Res<bool> {
    check_common(c)?;
    if !(0.0..=1.0).contains(&min_cover) {
        return Err(Fail::Usage(format!("--min-cover must lie in [0, 1], got {min_cover}")));
    }
    let compat = read_all(input)?;
    let eq = equation.map(read_series).transpose()?;
    let pos = read_all(positive)?;
    let sig = compat
        .first()
        .or(eq.as_ref())
        .or(pos.first())
        .map(|f| f.signature().clone())
        .ok_or_else(|| Fail::Usage("give at least one of --input, --equation, --positive".into()))?;
    if let Some(f) = compat.iter().chain(&eq).chain(&pos).find(|f| f.signature() != &sig) {
        return Err(Fail::Usage(format!("signature {} differs from {sig}", f.signature())));
    }
    let target = if eq.is_some() || !pos.is_empty() {
        let f = eq.unwrap_or_else(|| GenSeries::zero(&sig));
        ParamTarget::BasicSet(BasicSetDescriptor::new(f, pos)?)
    } else {
        ParamTarget::Polydisk(sig.clone())
    };
    let opts = ParamOptions {
        max_depth: c.max_depth,
        shrink: 0,
    };
    let param = build_local_parametrization(&target, &compat, &opts)?;
    let mut r = Report::new("parametrize");
    r.config("input", paths(input));
    r.config("equation", equation.map_or("-".into(), |p| p.display().to_string()));
    r.config("positive", paths(positive));
    r.config("max_depth", c.max_depth);
    r.config("seed", c.seed);
    r.config("samples", samples);
    r.config("cover_samples", cover_samples);
    r.config("min_cover", real(min_cover));
    r.line(format!("target {}", if matches!(target, ParamTarget::Polydisk(_)) { "polydisk" } else { "basic-set" }));
    r.line(format!("signature {sig}"));
    r.line(format!("charts {} of {}", param.charts.len(), param.total_charts));
    let cert: Vec<String> = param.certified_radius.iter().map(rational::format).collect();
    r.line(format!("certified_radius {}", cert.join(",")));
    r.line(format!("gaps {}", param.gaps));
    let mut t = Table::new(&["chart", "chain", "quadrant", "radius", "injective", "signs"]);
    for (k, pc) in param.charts.iter().enumerate() {
        let rad: Vec<String> = pc.chart.radius().iter().map(rational::format).collect();
        let signs: Vec<String> = pc.signs.iter().map(|s| sign(*s)).collect();
        t.row(vec![
            k.to_string(),
            pc.chart.chain.to_string(),
            pc.chart.domain.to_string(),
            rad.join(","),
            pc.chart.injectivity_certified().to_string(),
            signs.join(","),
        ]);
    }
    r.table(t);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let bad = check_sign_constancy(&param, samples, &mut rng);
    r.line(format!("sign_violations {}", bad.len()));
    for v in bad.iter().take(5) {
        r.line(format!("  chart {} function {} value {} expected {}", v.chart, v.function + 1, real(v.value), sign(v.expected)));
    }
    let mut covers = Vec::new();
    for shrink in [0, 1] {
        let p = if shrink == 0 {
            param.clone()
        } else {
            build_local_parametrization(&target, &compat, &ParamOptions { shrink, ..opts.clone() })?
        };
        let pts: Vec<Vec<f64>> = (0..cover_samples)
            .filter_map(|_| sample_target(&target, &p.certified_radius, 10_000, &mut rng))
            .collect();
        let frac = if pts.is_empty() { 0.0 } else { covering_fraction(&p.charts, &pts) };
        r.line(format!("covering shrink={shrink} points={} fraction={}", pts.len(), real(frac)));
        covers.push(frac);
    }
    let passed = bad.is_empty() && covers.iter().all(|f| *f >= min_cover);
    r.line(format!("certificates {}", if passed { "PASS" } else { "FAIL" }));
    emit(&r, &c.out, stdout)?;
    Ok(passed)
}

fn fibercut(input: &[PathBuf], m_split: usize, samples: usize, r_scale: f64, c: &Common, stdout: &mut String) -> Res<bool> {
    check_common(c)?;
    if !(r_scale > 0.0 && r_scale <= 1.0) {
        return Err(Fail::Usage(format!("--r-scale must lie in (0, 1], got {r_scale}")));
    }
    let comps = read_all(input)?;
    if m_split > comps.len() {
        return Err(Fail::Usage(format!("--m-split {m_split} exceeds {} components", comps.len())));
    }
    let sig = comps[0].signature().clone();
    if sig.n() > 0 {
        return Err(Fail::Usage("fiber cutting works on generalized variables only".into()));
    }
    let mut graph = comps.clone();
    for k in 0..sig.len() {
        graph.push(GenSeries::variable(&sig, k)?);
    }
    let map = SeriesMap::new(sig.clone(), graph)?;
    let opts = ParamOptions {
        max_depth: c.max_depth,
        shrink: 0,
    };
    let pieces = refine_maps_by_rank(&[map], m_split, &opts, samples, c.seed)?;
    let mut r = Report::new("fibercut");
    r.config("input", paths(input));
    r.config("m_split", m_split);
    r.config("max_depth", c.max_depth);
    r.config("seed", c.seed);
    r.config("samples", samples);
    r.config("r_scale", real(r_scale));
    r.config("tol", real(c.tol));
    r.line(format!("signature {sig}"));
    r.line(format!("pieces {}", pieces.len()));
    let mut t = Table::new(&["piece", "chain", "quadrant", "d", "rank", "iota", "equations", "converged", "escaped", "witness", "discrepancy", "residual", "status"]);
    let mut passed = true;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut exact = Vec::new();
    for (k, piece) in pieces.iter().enumerate() {
        let d = piece.map.dim();
        let iota: Vec<String> = piece.iota.iter().map(|i| (i + 1).to_string()).collect();
        let mut row = vec![
            k.to_string(),
            piece.chart.chain.to_string(),
            piece.chart.domain.to_string(),
            d.to_string(),
            piece.rank.to_string(),
            if iota.is_empty() { "-".into() } else { iota.join(",") },
        ];
        if piece.rank >= d {
            row.extend(["0", "-", "-", "-", "-", "-", "submersion"].map(String::from));
            t.row(row);
            continue;
        }
        let sys = fiber_cut_equations(&piece.map, m_split, piece.rank, &piece.iota)?;
        if d == 1 {
            exact.push(format!("piece {k}: critical x1 = {}", exact_critical_points_1d(&sys)?));
        }
        let rp: Vec<f64> = piece.map.signature().radius().iter().map(|x| r_scale * rational::to_f64(x)).collect();
        let rep = verify_fiber_cut(&sys, &rp, samples, &mut rng)?;
        let ok = rep.passed(c.tol);
        passed &= ok;
        row.extend([
            sys.equations.len().to_string(),
            rep.converged.to_string(),
            rep.escaped.to_string(),
            rep.witness_certified.to_string(),
            real(rep.max_discrepancy),
            real(rep.max_residual),
            if ok { "PASS" } else { "FAIL" }.to_string(),
        ]);
        t.row(row);
    }
    r.table(t);
    for e in exact {
        r.line(e);
    }
    emit(&r, &c.out, stdout)?;
    Ok(passed)
}

fn jet_setup(a: &JetArgs) -> Res<(BreakpointSystem, usize)> {
    check_common(&a.common)?;
    if a.k > a.p {
        return Err(Fail::Usage(format!("need k ≤ p (k = {}, p = {})", a.k, a.p)));
    }
    Ok((BreakpointSystem::dyadic(a.k), a.degree.unwrap_or_else(|| vlab::default_piece_degree(a.n, a.p))))
}

fn jet_config(r: &mut Report, a: &JetArgs, degree: usize) {
    r.config("n", a.n);
    r.config("p", a.p);
    r.config("k", a.k);
    r.config("degree", degree);
    r.config("seed", a.common.seed);
}

fn sign(s: i8) -> String {
    match s {
        0 => "0".into(),
        s if s > 0 => "+1".into(),
        _ => "-1".into(),
    }
}

fn random_theta<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn vlab_jet(a: &JetArgs, stdout: &mut String) -> Res<bool> {
    let (bp, degree) = jet_setup(a)?;
    let w = vlab::w_basis(&bp, degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let f = w.element(&random_theta(w.dim(), &mut rng))?;
    let x = vlab::separated_points(&bp, a.n, vlab::POINT_SEPARATION, &mut rng)?;
    let jet = vlab::jet_tuple(&f, &x, a.p, a.k)?;
    let mut r = Report::new("vlab jet");
    jet_config(&mut r, a, degree);
    r.line("order: points x_i (q = 0..p), marked values a_i (q <= i), one-sided a_i-/a_i+ (i < q <= p)");
    let xs: Vec<String> = x.iter().map(|v| real(*v)).collect();
    r.line(format!("x {}", xs.join(",")));
    r.line(format!("length {}", jet.values.len()));
    let mut t = Table::new(&["index", "coordinate", "value"]);
    for (k, (c, v)) in jet.layout.iter().zip(&jet.values).enumerate() {
        t.row(vec![k.to_string(), c.to_string(), real(*v)]);
    }
    r.table(t);
    emit(&r, &a.common.out, stdout)?;
    Ok(true)
}

fn vlab_wbasis(a: &JetArgs, stdout: &mut String) -> Res<bool> {
    let (bp, degree) = jet_setup(a)?;
    let mut r = Report::new("vlab wbasis");
    jet_config(&mut r, a, degree);
    let want = (a.k + 1) * (a.k + 2) / 2;
    let mut t = Table::new(&["k", "degree", "expected", "codimension", "numeric_rank", "dim_w", "ambient"]);
    let passed = match vlab::w_basis(&bp, degree) {
        Ok(w) => {
            t.row(vec![
                a.k.to_string(),
                degree.to_string(),
                want.to_string(),
                w.codimension.to_string(),
                w.numeric_rank.to_string(),
                w.dim().to_string(),
                w.ambient().to_string(),
            ]);
            r.table(t);
            w.codimension == want && w.numeric_rank == want
        }
        Err(e) => {
            r.table(t);
            r.line(format!("error {e}"));
            false
        }
    };
    r.line(format!("status {}", if passed { "PASS" } else { "FAIL" }));
    emit(&r, &a.common.out, stdout)?;
    Ok(passed)
}

fn vlab_gradcheck(a: &JetArgs, stdout: &mut String) -> Res<bool> {
    let (bp, degree) = jet_setup(a)?;
    let w = vlab::w_basis(&bp, degree)?;
    let f = vlab::VElement::zero(&bp);
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let mut r = Report::new("vlab gradcheck");
    jet_config(&mut r, a, degree);
    r.config("samples", a.samples);
    r.config("tol", real(a.common.tol));
    r.line(format!("l {}", vlab::submersion_dimension(a.n, a.p, a.k)));
    r.line(format!("dim_w {}", w.dim()));
    let mut t = Table::new(&["sample", "x", "error", "rank", "l"]);
    let mut passed = true;
    for s in 0..a.samples {
        let x = vlab::separated_points(&bp, a.n, vlab::POINT_SEPARATION, &mut rng)?;
        let theta = random_theta(w.dim(), &mut rng);
        let g = vlab::phi_jacobian(&f, &w, &x, &theta, a.p, a.k)?;
        passed &= g.error <= a.common.tol && g.rank == g.l;
        let xs: Vec<String> = x.iter().map(|v| real(*v)).collect();
        t.row(vec![s.to_string(), xs.join(","), real(g.error), g.rank.to_string(), g.l.to_string()]);
    }
    r.table(t);
    r.line(format!("status {}", if passed { "PASS" } else { "FAIL" }));
    emit(&r, &a.common.out, stdout)?;
    Ok(passed)
}

fn vlab_avoid(a: &JetArgs, input: &[PathBuf], stdout: &mut String) -> Res<bool> {
    let (bp, degree) = jet_setup(a)?;
    let x_set = read_all(input)?;
    let w = vlab::w_basis(&bp, degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let f = w.element(&random_theta(w.dim(), &mut rng))?;
    let hits = vlab::avoidance_check(&f, &x_set, a.n, a.p, a.k, a.grid)?;
    let mut r = Report::new("vlab avoid");
    jet_config(&mut r, a, degree);
    r.config("grid", a.grid);
    r.config("input", paths(input));
    r.line(format!("tuples {}", vlab::grid_tuples(&bp, a.n, a.grid).len()));
    r.line(format!("hits {}", hits.len()));
    let mut t = Table::new(&["hit", "x"]);
    for (k, x) in hits.iter().enumerate() {
        let xs: Vec<String> = x.iter().map(|v| real(*v)).collect();
        t.row(vec![k.to_string(), xs.join(",")]);
    }
    r.table(t);
    r.line(format!("status {}", if hits.is_empty() { "PASS" } else { "FAIL" }));
    emit(&r, &a.common.out, stdout)?;
    Ok(hits.is_empty())
}
