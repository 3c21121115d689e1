//! The `specunc` command line.
//!
//! Every subcommand writes one JSON document to stdout, except `envelope`,
//! which writes CSV. Diagnostics go to stderr. Exit codes: 1 malformed input,
//! 2 infeasible data, 3 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fixtures::{self, C0Convention, DemoFixture};
use crate::io::{self, load_bank, load_covariance, load_kernel, load_measure, load_pick, to_json};
use crate::measure::{normalize_angle, SpectralMeasure, DEFAULT_GRID};
use crate::metrics::{delta_k, delta_smooth, mass_range, transport_solution, TestKernel, TRANSPORT_GRID};
use crate::region::{RegionK, Shape};
use crate::schur::max_entropy_spectrum;
use crate::three::{np_spectrum, tune_poles, TuningOptions};
use crate::uncertainty::{
    apriori_bound_pick, apriori_bound_toeplitz, diameter_pick, diameter_toeplitz, DiscEnvelope, PickDiscs,
    ToeplitzDiscs,
};
use crate::{CovarianceSequence, PickData};

#[derive(Debug, Parser)]
#[command(name = "specunc", version, about = "Uncertainty of spectral estimates from moment data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    #[value(name = "deltaK")]
    DeltaK,
    Smooth,
    Transport,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Covariance lags c_0..c_n of a measure file (or `lebesgue`).
    Moments {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n: usize,
    },
    /// Maximum-entropy spectrum of a covariance file.
    Me {
        #[arg(long)]
        cov: String,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Central Nevanlinna–Pick spectrum of a Pick data file.
    Three {
        #[arg(long)]
        pick: String,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Diameter of the uncertainty set over a region.
    Diameter {
        #[arg(long, conflicts_with = "pick", required_unless_present = "pick")]
        cov: Option<String>,
        #[arg(long)]
        pick: Option<String>,
        #[arg(long)]
        region: String,
    },
    /// A-priori diameter bound: `--c0 --n` for covariances, `--poles --w0` for a filter bank.
    Bound {
        #[arg(long, requires = "n", conflicts_with_all = ["poles", "w0"], required_unless_present = "poles")]
        c0: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, requires = "w0")]
        poles: Option<String>,
        #[arg(long)]
        w0: Option<f64>,
        #[arg(long)]
        region: String,
    },
    /// CSV of the lower/upper/center values of the Poisson integral along a region.
    Envelope {
        #[arg(long, conflicts_with = "pick", required_unless_present = "pick")]
        cov: Option<String>,
        #[arg(long)]
        pick: Option<String>,
        #[arg(long)]
        region: String,
        /// Samples per region shape.
        #[arg(long, default_value_t = crate::region::DEFAULT_SAMPLES_PER_SHAPE)]
        circle_samples: usize,
    },
    /// Distance between two measure files.
    Metric {
        #[arg(long, value_enum)]
        kind: MetricKind,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Smallest and largest mass a kernel can see over spectra with given covariances.
    MassRange {
        #[arg(long)]
        cov: String,
        #[arg(long)]
        kernel: String,
    },
    /// Choose filter poles minimizing the a-priori bound over a region.
    TunePoles {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        w0: f64,
        /// Filter-bank file used as the first starting point.
        #[arg(long)]
        init: Option<String>,
    },
    /// Write all artifacts of a demonstration process into a directory.
    Demo {
        #[arg(value_parser = ["sec6", "sec8"])]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parse arguments, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command and return what it prints on stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Moments { measure, n } => to_json(&load_measure(measure)?.moments(*n)),
        Command::Me { cov, grid } => to_json(&max_entropy_spectrum(&load_covariance(cov)?, *grid)?),
        Command::Three { pick, grid } => to_json(&np_spectrum(&load_pick(pick)?, *grid)?),
        Command::Diameter { cov, pick, region } => {
            let k = RegionK::parse(region)?;
            let report = match (cov, pick) {
                (Some(c), _) => diameter_toeplitz(&load_covariance(c)?, &k)?,
                (None, Some(p)) => diameter_pick(&load_pick(p)?, &k)?,
                (None, None) => return Err(Error::invalid("diameter: give --cov or --pick")),
            };
            to_json(&report)
        }
        Command::Bound { c0, n, poles, w0, region } => {
            let k = RegionK::parse(region)?;
            match (c0, n, poles, w0) {
                (Some(c0), Some(n), _, _) => {
                    let bound = apriori_bound_toeplitz(*c0, *n, &k)?;
                    let z = k.max_modulus_point();
                    to_json(&json!({ "bound": bound, "argmax": [z.re, z.im] }))
                }
                (_, _, Some(p), Some(w0)) => to_json(&apriori_bound_pick(load_bank(p)?.poles(), *w0, &k)?),
                _ => Err(Error::invalid("bound: give --c0 and --n, or --poles and --w0")),
            }
        }
        Command::Envelope { cov, pick, region, circle_samples } => {
            let k = RegionK::parse_with_samples(region, *circle_samples)?;
            let discs = match (cov, pick) {
                (Some(c), _) => ToeplitzDiscs::new(&load_covariance(c)?)?.discs(&k.sample_points())?,
                (None, Some(p)) => PickDiscs::new(&load_pick(p)?)?.discs(&k.sample_points())?,
                (None, None) => return Err(Error::invalid("envelope: give --cov or --pick")),
            };
            Ok(envelope_csv(&k, &discs, &[]))
        }
        Command::Metric { kind, a, b, region, kernel, kappa } => {
            let (a, b) = (load_measure(a)?, load_measure(b)?);
            let value = match kind {
                MetricKind::DeltaK => {
                    let r = region.as_deref().ok_or_else(|| Error::invalid("metric deltaK needs --region"))?;
                    delta_k(&a, &b, &RegionK::parse(r)?)?
                }
                MetricKind::Smooth => {
                    let g = kernel.as_deref().ok_or_else(|| Error::invalid("metric smooth needs --kernel"))?;
                    let g = load_kernel(g)?;
                    warn_vanishing(&g);
                    delta_smooth(&a, &b, &g)?
                }
                MetricKind::Transport => {
                    let kappa = kappa.ok_or_else(|| Error::invalid("metric transport needs --kappa"))?;
                    let sol = transport_solution(&a, &b, kappa, TRANSPORT_GRID)?;
                    return to_json(&json!({
                        "kind": "transport",
                        "value": sol.value,
                        "dual_value": sol.dual_value,
                        "grid": sol.grid,
                    }));
                }
            };
            let name = match kind {
                MetricKind::DeltaK => "deltaK",
                MetricKind::Smooth => "smooth",
                MetricKind::Transport => "transport",
            };
            to_json(&json!({ "kind": name, "value": value }))
        }
        Command::MassRange { cov, kernel } => {
            let g = load_kernel(kernel)?;
            warn_vanishing(&g);
            to_json(&mass_range(&load_covariance(cov)?, &g)?)
        }
        Command::TunePoles { n, region, restarts, seed, w0, init } => {
            let k = RegionK::parse(region)?;
            let init = init.as_deref().map(load_bank).transpose()?;
            let opts = TuningOptions { restarts: *restarts, seed: *seed, init };
            to_json(&tune_poles(*n, &k, *w0, &opts)?)
        }
        Command::Demo { name, out } => demo(name, out),
    }
}

fn warn_vanishing(g: &TestKernel) {
    let zeros = g.vanishing_coefficients();
    if !zeros.is_empty() {
        eprintln!(
            "warning: kernel has vanishing Fourier coefficients at {:?}; the smoothed distance is only a pseudometric",
            &zeros[..zeros.len().min(8)]
        );
    }
}

/// Curve parameter of a sample in `(-π, π]`; the argument of `z` for interior
/// disc samples and points.
fn sample_parameter(k: &RegionK, i: usize) -> f64 {
    let s = &k.samples()[i];
    match s.curve {
        Some((_, phi, _)) => normalize_angle(phi),
        None => normalize_angle(s.z.arg()),
    }
}

/// Envelope CSV, header `shape,t,re,im,lower,upper,center` followed by one
/// column per named extra series of Poisson values.
///
/// Rows of circle shapes are sorted by `t`.
pub fn envelope_csv(k: &RegionK, discs: &[DiscEnvelope], extra: &[(&str, Vec<f64>)]) -> String {
    let mut out = String::from("shape,t,re,im,lower,upper,center");
    for (name, _) in extra {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let mut order: Vec<usize> = (0..discs.len()).collect();
    let samples = k.samples();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (samples[a].shape, samples[b].shape);
        if sa != sb || !matches!(k.shapes()[sa], Shape::Circle { .. }) {
            return sa.cmp(&sb).then(a.cmp(&b));
        }
        sample_parameter(k, a).total_cmp(&sample_parameter(k, b))
    });
    for i in order {
        let d = &discs[i];
        let (lo, hi) = d.poisson_range();
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            samples[i].shape,
            sample_parameter(k, i),
            d.z.re,
            d.z.im,
            lo,
            hi,
            d.center.re
        );
        for (_, v) in extra {
            let _ = write!(out, ",{}", v[i]);
        }
        out.push('\n');
    }
    out
}

/// CSV `theta,<name>...` of densities on a common grid (atoms omitted).
fn spectra_csv(series: &[(&str, &SpectralMeasure)]) -> String {
    let mut out = String::from("theta");
    for (name, _) in series {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let m = series[0].1;
    for j in 0..m.grid_size() {
        let _ = write!(out, "{}", m.theta(j));
        for (_, mu) in series {
            let _ = write!(out, ",{}", mu.density()[j]);
        }
        out.push('\n');
    }
    out
}

struct Artifacts<'a> {
    dir: &'a Path,
}

impl Artifacts<'_> {
    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        io::write_json(self.dir.join(name), value)
    }

    fn text(&self, name: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }
}

fn convention_name(c: C0Convention) -> &'static str {
    match c {
        C0Convention::AsStated => "as-stated",
        C0Convention::AsDisplayed => "as-displayed",
    }
}

fn toeplitz_envelope(
    out: &Artifacts,
    name: &str,
    c: &CovarianceSequence,
    k: &RegionK,
    truth: &SpectralMeasure,
    estimate: &SpectralMeasure,
) -> Result<()> {
    let zs = k.sample_points();
    let discs = ToeplitzDiscs::new(c)?.discs(&zs)?;
    let csv = envelope_csv(
        k,
        &discs,
        &[("truth", truth.poisson_many(&zs)?), ("estimate", estimate.poisson_many(&zs)?)],
    );
    out.text(name, &csv)
}

fn demo_sec6(f: &DemoFixture, out: &Artifacts) -> Result<serde_json::Value> {
    out.json("truth.json", &f.truth)?;
    let mut orders = Vec::new();
    let mut spectra: Vec<(String, SpectralMeasure)> = vec![("truth".into(), f.truth.clone())];
    for &n in &f.orders {
        eprintln!("sec6 [{}]: n = {n}", convention_name(f.convention));
        let c = f.covariances(n);
        let me = max_entropy_spectrum(&c, DEFAULT_GRID)?;
        let report = diameter_toeplitz(&c, &f.region)?;
        let err = delta_k(&f.truth, &me, &f.region)?;
        let bound = apriori_bound_toeplitz(c.c0(), n, &f.region)?;
        out.json(&format!("cov_n{n}.json"), &c)?;
        out.json(&format!("me_n{n}.json"), &me)?;
        out.json(&format!("diameter_n{n}.json"), &report)?;
        toeplitz_envelope(out, &format!("envelope_n{n}.csv"), &c, &f.region, &f.truth, &me)?;
        orders.push(json!({
            "n": n,
            "diameter": report.rho,
            "argmax_z": [report.argmax_z.re, report.argmax_z.im],
            "extremal_separation": report.achieved,
            "estimate_error": err,
            "apriori_bound": bound,
        }));
        spectra.push((format!("me_n{n}"), me));
    }
    let refs: Vec<(&str, &SpectralMeasure)> = spectra.iter().map(|(n, m)| (n.as_str(), m)).collect();
    out.text("spectra.csv", &spectra_csv(&refs))?;
    Ok(json!({
        "c0_convention": convention_name(f.convention),
        "c0": f.c0(),
        "region": f.region.to_string(),
        "orders": orders,
    }))
}

/// Local maxima of a density within `[lo, hi]`.
fn peaks(mu: &SpectralMeasure, lo: f64, hi: f64) -> Vec<f64> {
    let d = mu.density();
    let n = d.len();
    (0..n)
        .filter(|&j| {
            let t = mu.theta(j);
            t >= lo && t <= hi && d[j] > d[(j + n - 1) % n] && d[j] >= d[(j + 1) % n]
        })
        .map(|j| mu.theta(j))
        .collect()
}

fn demo_sec8(f: &DemoFixture, out: &Artifacts) -> Result<serde_json::Value> {
    eprintln!("sec8 [{}]", convention_name(f.convention));
    let n = f.orders[0];
    let c = f.covariances(n);
    let p: PickData = f.pick_data()?;
    let w0 = p.values()[0].re;
    let me = max_entropy_spectrum(&c, DEFAULT_GRID)?;
    let three = np_spectrum(&p, DEFAULT_GRID)?;
    let pick_report = diameter_pick(&p, &f.region)?;
    let cov_report = diameter_toeplitz(&c, &f.region)?;
    let pick_bound = apriori_bound_pick(p.nodes(), w0, &f.region)?;
    let cov_bound = apriori_bound_toeplitz(c.c0(), n, &f.region)?;
    let bank = crate::three::FilterBank::new(p.nodes().to_vec())?;

    out.json("truth.json", &f.truth)?;
    out.json(&format!("cov_n{n}.json"), &c)?;
    out.json("bank.json", &bank)?;
    out.json("pick.json", &p)?;
    out.json(&format!("me_n{n}.json"), &me)?;
    out.json("three.json", &three)?;
    out.json("diameter_pick.json", &pick_report)?;
    out.json(&format!("diameter_n{n}.json"), &cov_report)?;
    out.json("bound_pick.json", &pick_bound)?;
    toeplitz_envelope(out, &format!("envelope_n{n}.csv"), &c, &f.region, &f.truth, &me)?;
    let zs = f.region.sample_points();
    let discs = PickDiscs::new(&p)?.discs(&zs)?;
    let csv = envelope_csv(
        &f.region,
        &discs,
        &[("truth", f.truth.poisson_many(&zs)?), ("estimate", three.poisson_many(&zs)?)],
    );
    out.text("envelope_pick.csv", &csv)?;
    out.text("spectra.csv", &spectra_csv(&[("truth", &f.truth), ("me", &me), ("three", &three)]))?;

    Ok(json!({
        "c0_convention": convention_name(f.convention),
        "c0": c.c0(),
        "w0": w0,
        "region": f.region.to_string(),
        "n": n,
        "diameter_pick": pick_report.rho,
        "diameter_toeplitz": cov_report.rho,
        "diameter_ratio": pick_report.rho / cov_report.rho,
        "apriori_bound_pick": pick_bound.bound,
        "apriori_bound_pick_per_w0": pick_bound.bound / w0,
        "apriori_bound_toeplitz": cov_bound,
        "estimate_error_me": delta_k(&f.truth, &me, &f.region)?,
        "estimate_error_three": delta_k(&f.truth, &three, &f.region)?,
        "three_peaks_near_lines": peaks(&three, 0.3, 0.8),
        "me_peaks_near_lines": peaks(&me, 0.3, 0.8),
    }))
}

/// Write the artifacts of a demo for both total-mass conventions into
/// `out/<convention>/` and return the summary document.
pub fn demo(name: &str, out: &Path) -> Result<String> {
    let mut runs = Vec::new();
    for conv in [C0Convention::AsStated, C0Convention::AsDisplayed] {
        let f = fixtures::by_name(name, conv)?;
        let dir = out.join(convention_name(conv));
        fs::create_dir_all(&dir)?;
        let art = Artifacts { dir: &dir };
        let summary = match name {
            "sec6" => demo_sec6(&f, &art)?,
            _ => demo_sec8(&f, &art)?,
        };
        art.json("summary.json", &summary)?;
        runs.push(summary);
    }
    let doc = json!({ "demo": name, "out": out.display().to_string(), "runs": runs });
    io::write_json(out.join("summary.json"), &doc)?;
    to_json(&doc)
}
