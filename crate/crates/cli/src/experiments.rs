use std::collections::HashMap;
use std::path::{Path, PathBuf};

use lcft_core::bootstrap::{
    crossing_check, four_point_bootstrap_with, BootstrapOptions, Channel, MetricFactor, SpectralQuadrature,
};
use lcft_core::correlators::{correlator_mc, correlators_common, CorrelatorJob};
use lcft_core::gmc::oracle::circle_moment_closed_form;
use lcft_core::gmc::{chaos_moment, Geometry, SphereFieldSpec};
use lcft_core::special::dozz::three_point_fixed;
use lcft_core::special::{dozz_real, UpsilonEvaluator};
use lcft_core::virasoro::{block, CoefficientCache};
use lcft_core::{CFTParams, InsertionSet, SpherePoint};

use crate::config::*;
use crate::record::{Check, Metric};
use crate::CliError;

/// Run-wide settings shared by every experiment.
pub struct Context {
    pub seed: u64,
    pub tolerance_scale: f64,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
}

impl Context {
    fn sigmas(&self, default: f64) -> f64 {
        self.tolerances.sigmas.unwrap_or(default) * self.tolerance_scale
    }

    fn relative(&self, default: f64) -> f64 {
        self.tolerances.relative.unwrap_or(default) * self.tolerance_scale
    }
}

pub struct Outcome {
    pub outputs: Vec<String>,
    pub metrics: Vec<Metric>,
}

/// `%.8e`-style scientific notation: two-digit signed exponent.
pub fn sci(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.digits$e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let path = dir.join(name);
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(&path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(name.to_string())
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn params(gamma: f64, mu: f64) -> Result<CFTParams, CliError> {
    Ok(CFTParams::new(gamma, mu)?)
}

pub fn run(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let missing = || CliError::Usage(format!("config of kind {} lacks its table", cfg.kind));
    match cfg.kind {
        Kind::DozzTable => dozz_table(cfg.dozz_table.as_ref().ok_or_else(missing)?, ctx),
        Kind::GmcMoments => gmc_moments(cfg.gmc_moments.as_ref().ok_or_else(missing)?, ctx),
        Kind::Correlator => correlator(cfg.correlator.as_ref().ok_or_else(missing)?, ctx),
        Kind::Block => block_ledger(cfg.block.as_ref().ok_or_else(missing)?, ctx),
        Kind::Bootstrap4pt => bootstrap(cfg.bootstrap4pt.as_ref().ok_or_else(missing)?, ctx),
        Kind::Crossing => crossing(cfg.crossing.as_ref().ok_or_else(missing)?, ctx),
        Kind::McVsDozz => mc_vs_dozz(cfg.mc_vs_dozz.as_ref().ok_or_else(missing)?, ctx),
        Kind::McVsBootstrap => mc_vs_bootstrap(cfg.mc_vs_bootstrap.as_ref().ok_or_else(missing)?, ctx),
    }
}

fn dozz_table(c: &DozzTableConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let mut evaluators: HashMap<u64, UpsilonEvaluator> = HashMap::new();
    let mut rows = Vec::with_capacity(c.rows.len());
    let mut poles = 0usize;
    for &[g, a1, a2, a3] in &c.rows {
        let p = params(g, c.mu)?;
        let ev = match evaluators.get(&g.to_bits()) {
            Some(ev) => ev,
            None => evaluators.entry(g.to_bits()).or_insert(UpsilonEvaluator::new(g)?),
        };
        let v = dozz_real(a1, a2, a3, &p, ev)?;
        poles += v.is_pole as usize;
        rows.push(vec![
            format!("{g:?}"),
            format!("{a1:?}"),
            format!("{a2:?}"),
            format!("{a3:?}"),
            sci(v.value.re, 8),
            sci(v.value.im, 8),
        ]);
    }
    let file = write_csv(&ctx.out_dir, "dozz_table.csv", &["gamma", "alpha1", "alpha2", "alpha3", "re", "im"], &rows)?;
    Ok(Outcome {
        outputs: vec![file],
        metrics: vec![Metric::value("rows", rows.len() as f64), Metric::value("poles", poles as f64)],
    })
}

fn gmc_moments(c: &GmcMomentsConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let spec = c.field_spec(ctx.seed);
    let sigmas = ctx.sigmas(3.0);
    let mut rows = Vec::new();
    let mut metrics = Vec::new();
    let area = match c.geometry {
        Geometry::Circle => 1.0,
        Geometry::Sphere => 4.0 * std::f64::consts::PI,
    };
    let robin = match c.geometry {
        Geometry::Circle => 0.0,
        Geometry::Sphere => lcft_core::correlators::ROBIN_SPHERE,
    };
    for &q in &c.moments {
        let est = chaos_moment(&spec, c.gamma, q, c.samples)?;
        // exact references: the mean, and integer circle moments below the blow-up
        let reference = if q == 0.0 {
            Some(1.0)
        } else if q == 1.0 {
            Some(area * (0.5 * c.gamma * c.gamma * robin).exp())
        } else if c.geometry == Geometry::Circle && q.fract() == 0.0 && q > 1.0 && q * c.gamma * c.gamma < 2.0 {
            Some(circle_moment_closed_form(q as u32, c.gamma))
        } else {
            None
        };
        let mut m = Metric::estimate(&format!("moment_{q}"), est.mean, est.stderr);
        if reference.is_some() {
            m = m.judged(reference, Check::Sigmas { sigmas });
        }
        rows.push(vec![
            num(q),
            num(est.mean),
            num(est.stderr),
            reference.map(num).unwrap_or_default(),
            reference.map(|r| num(est.z_score(r))).unwrap_or_default(),
            num(est.effective_sample_size),
        ]);
        metrics.push(m);
    }
    let file = write_csv(
        &ctx.out_dir,
        "gmc_moments.csv",
        &["q", "estimate", "stderr", "reference", "z_score", "effective_samples"],
        &rows,
    )?;
    Ok(Outcome { outputs: vec![file], metrics })
}

fn correlator(c: &CorrelatorConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let p = params(c.gamma, c.mu)?;
    let pts = c.points.iter().map(|x| x.to_point()).collect();
    let ins = InsertionSet::new(pts, c.weights.clone(), &p)?;
    let job = CorrelatorJob::new(ins, p, SphereFieldSpec::new(c.lmax, ctx.seed), c.samples)?.with_kernel(c.kernel);
    let e = correlator_mc(&job)?;
    let row = vec![
        num(e.value.mean),
        num(e.value.stderr),
        num(e.s),
        num(e.ln_prefactor),
        num(e.moment.mean),
        num(e.moment.stderr),
        num(e.moment.effective_sample_size),
        e.value.n_samples.to_string(),
        ctx.seed.to_string(),
    ];
    let file = write_csv(
        &ctx.out_dir,
        "correlator.csv",
        &["estimate", "stderr", "s", "ln_prefactor", "moment", "moment_stderr", "effective_samples", "samples", "seed"],
        &[row],
    )?;
    Ok(Outcome {
        outputs: vec![file],
        metrics: vec![
            Metric::estimate("estimate", e.value.mean, e.value.stderr),
            Metric::estimate("moment", e.moment.mean, e.moment.stderr),
            Metric::value("s", e.s),
        ],
    })
}

fn block_ledger(c: &BlockConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let p = params(c.gamma, 1.0)?;
    let b = block(c.p, c.deltas, complex(c.z), c.level, &p)?;
    let rows: Vec<Vec<String>> = b
        .coefficients
        .iter()
        .enumerate()
        .map(|(l, a)| {
            let v = b.partial(l);
            vec![l.to_string(), num(a.re), num(a.im), num(v.re), num(v.im)]
        })
        .collect();
    let file = write_csv(
        &ctx.out_dir,
        "block.csv",
        &["level", "coefficient_re", "coefficient_im", "partial_re", "partial_im"],
        &rows,
    )?;
    Ok(Outcome {
        outputs: vec![file],
        metrics: vec![
            Metric::value("value_re", b.value.re),
            Metric::value("value_im", b.value.im),
            Metric::value("delta", b.delta),
            Metric::value("tail_estimate", b.tail_estimate),
        ],
    })
}

fn levels_csv(dir: &Path, name: &str, by_level: &[f64]) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = by_level.iter().enumerate().map(|(l, v)| vec![l.to_string(), num(*v)]).collect();
    write_csv(dir, name, &["level", "value"], &rows)
}

fn bootstrap(c: &BootstrapConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let p = params(c.gamma, c.mu)?;
    let quad = c.quadrature.build()?;
    let cache = match &c.cache_dir {
        Some(d) => Some(CoefficientCache::new(d)?),
        None => None,
    };
    let opts = BootstrapOptions { frame: c.frame, metric: c.metric, cache };
    let r = four_point_bootstrap_with(complex(c.z), c.alphas, &quad, &p, &opts)?;
    let rows: Vec<Vec<String>> =
        r.samples.iter().map(|s| vec![num(s.p), num(s.weight), num(s.value), num(s.block_tail)]).collect();
    let f1 = write_csv(&ctx.out_dir, "bootstrap_integrand.csv", &["p", "weight", "integrand", "block_tail"], &rows)?;
    let f2 = levels_csv(&ctx.out_dir, "bootstrap_levels.csv", &r.by_level)?;
    Ok(Outcome {
        outputs: vec![f1, f2],
        metrics: vec![
            Metric::value("value", r.value),
            Metric::value("p_tail", r.p_tail),
            Metric::value("block_tail", r.block_tail),
        ],
    })
}

/// Number of levels from `from` on where the discrepancy grows.
pub fn increases_from(by_level: &[f64], from: usize) -> usize {
    let tail = &by_level[from.min(by_level.len() - 1)..];
    tail.windows(2).filter(|w| w[1] > w[0]).count()
}

fn crossing(c: &CrossingConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let p = params(c.gamma, c.mu)?;
    let quad = c.quadrature.build()?;
    let r = crossing_check(complex(c.z), c.alphas, c.channel, &quad, &p)?;
    let rows: Vec<Vec<String>> = (0..=quad.level)
        .map(|l| vec![l.to_string(), num(r.direct.by_level[l]), num(r.crossed.by_level[l]), num(r.by_level[l])])
        .collect();
    let file = write_csv(&ctx.out_dir, "crossing.csv", &["level", "direct", "crossed", "discrepancy"], &rows)?;
    let mut metrics = vec![
        Metric::value("discrepancy", r.discrepancy).judged(None, Check::AtMost { bound: ctx.relative(0.02) }),
        Metric::value("direct", r.direct.value),
        Metric::value("crossed", r.crossed.value),
    ];
    if c.channel != Channel::S {
        let ups = increases_from(&r.by_level, 6) as f64;
        metrics.push(Metric::value("increases_from_level_6", ups).judged(None, Check::AtMost { bound: 0.0 }));
    }
    Ok(Outcome { outputs: vec![file], metrics })
}

fn mc_vs_dozz(c: &McVsDozzConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let p = params(c.gamma, c.mu)?;
    let z = c.points.map(complex);
    let ev = UpsilonEvaluator::new(c.gamma)?;
    let exact = three_point_fixed(z, c.weights_a, &p, &ev)? / three_point_fixed(z, c.weights_b, &p, &ev)?;
    let jobs = [c.weights_a, c.weights_b]
        .iter()
        .map(|w| {
            let ins = InsertionSet::new(z.iter().map(|&x| SpherePoint::Finite(x)).collect(), w.to_vec(), &p)?;
            CorrelatorJob::new(ins, p, SphereFieldSpec::new(c.lmax, ctx.seed), c.samples)
        })
        .collect::<lcft_core::Result<Vec<_>>>()?;
    let crn = correlators_common(&jobs)?;
    let r = crn.ratio(0, 1);
    let check = Check::RelativeOrSigmas { relative: ctx.relative(0.05), sigmas: ctx.sigmas(3.0) };
    let m = Metric::estimate("ratio", r.mean, r.stderr).judged(Some(exact.re), check);
    let row = vec![num(r.mean), num(r.stderr), num(exact.re), num(r.mean / exact.re - 1.0), num(r.effective_sample_size)];
    let file = write_csv(
        &ctx.out_dir,
        "mc_vs_dozz.csv",
        &["mc_ratio", "mc_stderr", "dozz_ratio", "relative_difference", "effective_samples"],
        &[row],
    )?;
    Ok(Outcome { outputs: vec![file], metrics: vec![m] })
}

fn mc_vs_bootstrap(c: &McVsBootstrapConfig, ctx: &Context) -> Result<Outcome, CliError> {
    let p = params(c.gamma, c.mu)?;
    let quad: SpectralQuadrature = c.quadrature.build()?;
    let opts = BootstrapOptions { metric: MetricFactor::Round, ..Default::default() };
    let b1 = four_point_bootstrap_with(complex(c.z), c.alphas, &quad, &p, &opts)?;
    let b2 = four_point_bootstrap_with(complex(c.z_prime), c.alphas, &quad, &p, &opts)?;
    let exact = b1.value / b2.value;
    let jobs = [c.z, c.z_prime]
        .iter()
        .map(|&z| {
            let pts = vec![
                SpherePoint::finite(0.0, 0.0),
                SpherePoint::Finite(complex(z)),
                SpherePoint::finite(1.0, 0.0),
                SpherePoint::Infinity,
            ];
            let ins = InsertionSet::new(pts, c.alphas.to_vec(), &p)?;
            CorrelatorJob::new(ins, p, SphereFieldSpec::new(c.lmax, ctx.seed), c.samples)
        })
        .collect::<lcft_core::Result<Vec<_>>>()?;
    let crn = correlators_common(&jobs)?;
    let r = crn.ratio(0, 1);
    let m = Metric::estimate("ratio", r.mean, r.stderr).judged(Some(exact), Check::Relative { relative: ctx.relative(0.10) });
    let row = vec![num(r.mean), num(r.stderr), num(exact), num(r.mean / exact - 1.0)];
    let file = write_csv(
        &ctx.out_dir,
        "mc_vs_bootstrap.csv",
        &["mc_ratio", "mc_stderr", "bootstrap_ratio", "relative_difference"],
        &[row],
    )?;
    Ok(Outcome { outputs: vec![file], metrics: vec![m] })
}
