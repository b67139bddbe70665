use std::fmt;
use std::io::Write;
use std::path::Path;

use coopmotion::evolution::{evolve, evolve_l_of_m, find_monotonicity_violation};
use coopmotion::harness::LipschitzInitial;
use coopmotion::hj::{
    beta_limit_cdf, extended_limit_cdf, legendre_closed, mixture_limit_cdf, sandwich_radius, u_ab_closed,
    PiecewiseLinear,
};
use coopmotion::montecarlo::{cdf_sup_distance, dkw_bound, sample_ensemble, sample_particle_system, TrajectoryConfig};
use coopmotion::{Experiment, LatticeDist, ModelParams, RunReport, StepLaw};
use clap::ValueEnum;
use tempfile::NamedTempFile;

use crate::args::*;

/// Confidence level of the DKW band printed by `simulate`.
const DKW_ALPHA: f64 = 1e-3;

/// Longer series are summarised rather than listed on stdout.
const SUMMARY_SERIES_MAX: usize = 20;

/// A usage, configuration or I/O failure. Always maps to exit code 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<coopmotion::Error> for Failure {
    fn from(e: coopmotion::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(e.to_string())
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(msg.into()))
}

/// Run one subcommand. `Ok(false)` means a FAIL verdict.
pub fn dispatch(cmd: Command) -> Result<bool, Failure> {
    match cmd {
        Command::Evolve(a) => evolve_cmd(a).map(|_| true),
        Command::Simulate(a) => simulate_cmd(a).map(|_| true),
        Command::Reference(a) => reference_cmd(a).map(|_| true),
        Command::Counterexample(a) => counterexample_cmd(a).map(|_| true),
        Command::Converge(a) => {
            let params = model(a.model)?;
            let job = match a.mode {
                ConvergeMode::Dirac => {
                    if a.knots.is_some() || a.profile.is_some() {
                        return fail("--knots and --profile only apply to --mode lipschitz");
                    }
                    let init = LatticeDist::parse_spec(a.init.as_deref().unwrap_or("0:1"))?;
                    Experiment::Dirac { params, init, n_list: a.n_list }
                }
                ConvergeMode::Lipschitz => {
                    if a.init.is_some() {
                        return fail("--init only applies to --mode dirac; use --knots or --profile");
                    }
                    let init = match (a.knots, a.profile) {
                        (Some(k), _) => LipschitzInitial::PiecewiseLinear(PiecewiseLinear::new(parse_knots(&k)?)?),
                        (None, Some(p)) => match p[..] {
                            [a, b, t0] => LipschitzInitial::SolutionProfile { a, b, t0 },
                            _ => return fail("--profile expects three values a,b,t0"),
                        },
                        (None, None) => LipschitzInitial::PiecewiseLinear(PiecewiseLinear::ramp(1.0)?),
                    };
                    Experiment::Lipschitz { params, init, n_list: a.n_list, horizon: a.horizon }
                }
            };
            experiment(job, &a.output)
        }
        Command::Lattice(a) => {
            experiment(Experiment::Lattice { params: model(a.model)?, g: a.g, pi: a.pi, n: a.n }, &a.output)
        }
        Command::Extended(a) => {
            experiment(Experiment::Extended { params: model(a.model)?, a: a.a, b: a.b, n: a.n }, &a.output)
        }
        Command::Sandwich(a) => {
            let init = LatticeDist::parse_spec(&a.init)?;
            experiment(Experiment::Sandwich { params: model(a.model)?, eps: a.eps, n: a.n, init }, &a.output)
        }
        Command::LOfM(a) => {
            experiment(Experiment::LOfM { params: model(a.model)?, l: a.l, n_list: a.n_list }, &a.output)
        }
    }
}

fn model(a: ModelArgs) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(a.m, a.q)?)
}

fn step_law(spec: Option<&str>, params: &ModelParams) -> Result<StepLaw, Failure> {
    Ok(match spec {
        Some(s) => StepLaw::parse_spec(s)?,
        None => StepLaw::bernoulli(params.q())?,
    })
}

fn evolve_cmd(a: EvolveArgs) -> Result<(), Failure> {
    let params = model(a.model)?;
    let init = LatticeDist::parse_spec(&a.init)?;
    let out = match a.l {
        Some(l) => evolve_l_of_m(&init, &params, l, a.n)?,
        None => evolve(&init, &step_law(a.step.as_deref(), &params)?, &params, a.n)?,
    };
    emit(a.out.as_deref(), &pmf_csv(&out))?;
    if let Some(path) = &a.out {
        println!("wrote {} atoms to {}", out.atoms().len(), path.display());
    }
    Ok(())
}

fn simulate_cmd(a: SimulateArgs) -> Result<(), Failure> {
    let params = model(a.model)?;
    let step = step_law(a.step.as_deref(), &params)?;
    let init = LatticeDist::parse_spec(&a.init)?;
    let cfg = TrajectoryConfig {
        params,
        step: step.clone(),
        init: init.clone(),
        horizon: a.n,
        n_trajectories: a.trajectories,
        seed: a.seed,
    };
    let (empirical, samples) = match a.particles {
        Some(k) => (sample_particle_system(&cfg, k)?, k as u64),
        None => (sample_ensemble(&cfg)?, a.trajectories),
    };
    emit(a.out.as_deref(), &pmf_csv(&empirical))?;
    if a.out.is_some() {
        let exact = evolve(&init, &step, &params, a.n)?;
        println!("samples={samples}");
        println!("sup_cdf_distance_to_exact={}", cdf_sup_distance(&empirical, &exact));
        println!("dkw_bound_alpha_{DKW_ALPHA}={}", dkw_bound(samples, DKW_ALPHA));
    }
    Ok(())
}

fn reference_cmd(a: ReferenceArgs) -> Result<(), Failure> {
    let params = model(a.model)?;
    let kind = a.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure(format!("--kind {kind} needs --{name}")));
    let value: Box<dyn Fn(f64) -> Result<f64, Failure>> = match a.kind {
        ReferenceKind::Beta => Box::new(move |x| Ok(beta_limit_cdf(x, &params))),
        ReferenceKind::Extended => {
            let (lo, hi) = (need(a.a, "a")?, need(a.b, "b")?);
            Box::new(move |x| Ok(extended_limit_cdf(x, lo, hi, &params)?))
        }
        ReferenceKind::Mixture => {
            let g = a.g.ok_or_else(|| Failure("--kind mixture needs --g".into()))?;
            let pi = a.pi.clone().ok_or_else(|| Failure("--kind mixture needs --pi".into()))?;
            Box::new(move |x| Ok(mixture_limit_cdf(x, g, &pi, &params)?))
        }
        ReferenceKind::UAb => {
            let (lo, hi, t) = (need(a.a, "a")?, need(a.b, "b")?, a.t);
            Box::new(move |x| Ok(u_ab_closed(x, t, lo, hi, &params)?))
        }
        ReferenceKind::HopfLax => {
            let knots = a.knots.as_deref().ok_or_else(|| Failure("--kind hopf-lax needs --knots".into()))?;
            let f = PiecewiseLinear::new(parse_knots(knots)?)?;
            let t = a.t;
            Box::new(move |x| Ok(f.hopf_lax(x, t, &params)))
        }
        ReferenceKind::Legendre => {
            let p = need(a.p, "p")?;
            return emit(a.out.as_deref(), &format!("{}\n", legendre_closed(p, &params)));
        }
        ReferenceKind::SandwichRadius => {
            let eps = need(a.eps, "eps")?;
            return emit(a.out.as_deref(), &format!("{}\n", sandwich_radius(eps, &params)?));
        }
    };
    let text = match (&a.grid, a.x) {
        (Some(g), _) => {
            let mut out = String::from("x,value\n");
            for x in parse_grid(g)? {
                out.push_str(&format!("{x},{}\n", value(x)?));
            }
            out
        }
        (None, Some(x)) => format!("{}\n", value(x)?),
        (None, None) => return fail(format!("--kind {kind} needs --x or --grid")),
    };
    emit(a.out.as_deref(), &text)
}

fn counterexample_cmd(a: CounterexampleArgs) -> Result<(), Failure> {
    let params = ModelParams::new(a.m, a.q)?;
    let step = StepLaw::parse_spec(&a.step)?;
    match find_monotonicity_violation(&step, &params, a.trials, a.seed)? {
        Some(v) => {
            println!("violation at site {}", v.site);
            println!("dominant:  {}", spec_string(&v.dominant));
            println!("dominated: {}", spec_string(&v.dominated));
            println!("images at site {}: {} > {}", v.site, v.dominant_image, v.dominated_image);
            println!("origin: {:?}", v.origin);
        }
        None => println!("no violation found in {} trials", a.trials),
    }
    Ok(())
}

fn experiment(job: Experiment, out: &ReportArgs) -> Result<bool, Failure> {
    let mut report = job.run()?;
    if let Some(p) = &out.series {
        write_atomic(p, &report.series_csv())?;
        report.artifacts.push(p.display().to_string());
    }
    if let Some(p) = &out.report {
        report.artifacts.push(p.display().to_string());
        write_atomic(p, &report.to_json()?)?;
    }
    print_summary(&report);
    Ok(report.passed())
}

fn print_summary(r: &RunReport) {
    println!("experiment {}", r.experiment);
    for (k, v) in &r.parameters {
        println!("  {k} = {v}");
    }
    if r.series.len() <= SUMMARY_SERIES_MAX {
        println!("n,sup_error");
        for p in &r.series {
            println!("{},{}", p.n, num(p.value));
        }
    } else {
        let worst = r.series.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
        println!("series: {} points, max {}", r.series.len(), num(worst));
    }
    if let Some(s) = r.fitted_rate {
        println!("fitted_rate {}", num(s));
    }
    for (k, v) in &r.metrics {
        println!("{k} {}", num(*v));
    }
    for n in &r.notes {
        println!("note: {n}");
    }
    let word = if r.passed() { "PASS" } else { "FAIL" };
    println!("verdict {word} (tolerance {}): {}", num(r.verdict.tolerance), r.verdict.rule);
}

/// Plain notation, switching to scientific for very small magnitudes.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn pmf_csv(d: &LatticeDist) -> String {
    let mut out = String::from("site,mass\n");
    for (s, p) in d.atoms() {
        out.push_str(&format!("{s},{p}\n"));
    }
    out
}

fn spec_string(d: &LatticeDist) -> String {
    d.atoms().iter().map(|(s, p)| format!("{s}:{p}")).collect::<Vec<_>>().join(",")
}

fn parse_knots(spec: &str) -> Result<Vec<(f64, f64)>, Failure> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (x, v) = item.rsplit_once(':').ok_or_else(|| Failure(format!("bad knot {item:?}")))?;
            match (x.trim().parse::<f64>(), v.trim().parse::<f64>()) {
                (Ok(x), Ok(v)) => Ok((x, v)),
                _ => fail(format!("bad knot {item:?}")),
            }
        })
        .collect()
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure(format!("--grid expects lo:hi:count, got {spec:?}"));
    let [lo, hi, count] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count < 2 || lo.is_nan() || hi.is_nan() || hi <= lo {
        return Err(bad());
    }
    Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect())
}

/// Write to `path` atomically, or to stdout when there is no path.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Write via a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let context = |e: std::io::Error| Failure(format!("cannot write {}: {e}", path.display()));
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir).map_err(context)?;
    tmp.write_all(text.as_bytes()).map_err(context)?;
    tmp.persist(path).map_err(|e| context(e.error))?;
    Ok(())
}
