//! Implementations of the five subcommands.

use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use loglindley::bayes::mcmc::{metropolis_check, McmcOptions};
use loglindley::bayes::{fit_bayes, posterior, PriorSpec};
use loglindley::distribution::{LogLindley, Sample};
use loglindley::mle::fit as ml_fit;
use loglindley::reliability::{reliability_bayes, reliability_ml, ReliabilityReport};
use loglindley::simulation::{
    run_bayes_study, run_ml_study, run_reliability_study, write_param_rows_csv,
    write_reliability_rows_csv, ParamStudyConfig, ReliabilityStudyConfig, RunManifest,
};

use crate::data;
use crate::{
    CliError, CliResult, FitArgs, GenerateArgs, Method, ReliabilityArgs, SimulateArgs, TraceArgs,
};

pub fn fit(args: &FitArgs) -> CliResult<()> {
    let sample = data::load_one_group(&args.input, args.scale)?;
    let m = sample.len();
    let report = match args.method {
        Method::Ml => {
            let f = ml_fit(&sample, args.level)?;
            println!("method          ml");
            println!("m               {m}");
            print_estimate_line("sigma", f.sigma, f.ci_sigma.lo, f.ci_sigma.hi, args.level);
            print_estimate_line("pi", f.pi, f.ci_pi.lo, f.ci_pi.hi, args.level);
            println!("log-likelihood  {:.4}", f.log_likelihood);
            if f.boundary_pi {
                println!("note            pi estimate lies on the boundary of [0, 1]");
            }
            tagged_json(&f, "ml", m)?
        }
        Method::Bayes => {
            let prior = PriorSpec::new(
                args.prior_tau,
                args.prior_delta,
                args.prior_alpha,
                args.prior_beta,
            )?;
            let f = fit_bayes(&sample, &prior, args.level)?;
            println!("method          bayes");
            println!("m               {m}");
            print_estimate_line("sigma", f.sigma, f.cri_sigma.lo, f.cri_sigma.hi, args.level);
            print_estimate_line("pi", f.pi, f.cri_pi.lo, f.cri_pi.hi, args.level);
            println!("var(sigma)      {:.4}", f.var_sigma);
            println!("var(pi)         {:.4}", f.var_pi);
            tagged_json(&f, "bayes", m)?
        }
    };
    write_json_report(args.out.as_deref(), &report)
}

fn print_estimate_line(name: &str, est: f64, lo: f64, hi: f64, level: f64) {
    println!("{name:<15} {est:.4}  [{:.1}% interval ({lo:.4}, {hi:.4})]", level * 100.0);
}

fn tagged_json<T: Serialize>(value: &T, method: &str, m: usize) -> CliResult<serde_json::Value> {
    let mut v = serde_json::to_value(value)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    let obj = v.as_object_mut().expect("report serializes to an object");
    obj.insert("method".into(), method.into());
    obj.insert("m".into(), m.into());
    Ok(v)
}

pub fn reliability(args: &ReliabilityArgs) -> CliResult<()> {
    let ((label_a, sample_a), (label_b, sample_b)) = data::load_two_group(&args.input, args.scale)?;
    // Assign the strength role X.
    let strength_label = args.strength_group.clone().unwrap_or_else(|| label_a.clone());
    let ((x_label, xs), (y_label, ys)) = if strength_label == label_a {
        ((label_a, sample_a), (label_b, sample_b))
    } else if strength_label == label_b {
        ((label_b, sample_b), (label_a, sample_a))
    } else {
        return Err(CliError::input(format!(
            "--strength-group {strength_label:?} matches neither group ({label_a:?}, {label_b:?})"
        )));
    };
    println!("strength (X)    {x_label}  (m = {})", xs.len());
    println!("stress   (Y)    {y_label}  (n = {})", ys.len());

    let report: ReliabilityReport = match args.method {
        Method::Ml => {
            let fx = ml_fit(&xs, args.level)?;
            let fy = ml_fit(&ys, args.level)?;
            print_group_fit(&x_label, fx.sigma, fx.pi, &fx.covariance);
            print_group_fit(&y_label, fy.sigma, fy.pi, &fy.covariance);
            reliability_ml(&xs, &ys, args.level)?
        }
        Method::Bayes => {
            let prior_x = PriorSpec::new(
                args.prior_tau_x,
                args.prior_delta_x,
                args.prior_alpha_x,
                args.prior_beta_x,
            )?;
            let prior_y = PriorSpec::new(
                args.prior_tau_y,
                args.prior_delta_y,
                args.prior_alpha_y,
                args.prior_beta_y,
            )?;
            let fx = fit_bayes(&xs, &prior_x, args.level)?;
            let fy = fit_bayes(&ys, &prior_y, args.level)?;
            println!("{:<15} sigma {:.4}  pi {:.4}", x_label, fx.sigma, fx.pi);
            println!("{:<15} sigma {:.4}  pi {:.4}", y_label, fy.sigma, fy.pi);
            reliability_bayes(&xs, &ys, &prior_x, &prior_y, args.level, args.draws, args.seed)?
        }
    };
    println!(
        "R = P(Y < X)    {:.4}  [{:.1}% interval ({:.4}, {:.4})]",
        report.r_hat,
        args.level * 100.0,
        report.interval_clamped.lo,
        report.interval_clamped.hi
    );
    if let Some(var) = report.variance {
        println!("var(R)          {var:.4}");
    }
    println!(
        "D = 1 - 2R      {:.4}  [interval ({:.4}, {:.4})]",
        report.d_hat, report.d_interval.lo, report.d_interval.hi
    );
    let json = serde_json::to_value(&report)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    write_json_report(args.out.as_deref(), &json)
}

fn print_group_fit(label: &str, sigma: f64, pi: f64, cov: &[[f64; 2]; 2]) {
    println!(
        "{label:<15} sigma {sigma:.4} (var {:.4})  pi {pi:.4} (var {:.4})",
        cov[0][0], cov[1][1]
    );
}

fn write_json_report(out: Option<&Path>, json: &serde_json::Value) -> CliResult<()> {
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(json)
            .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
        std::fs::write(path, text + "\n")?;
        println!("report          {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn default_replicates() -> usize {
    1000
}

fn default_level() -> f64 {
    0.95
}

fn default_posterior_draws() -> usize {
    10000
}

/// Study description file.  `kind` selects the study; `both` runs the
/// maximum-likelihood and Bayesian parameter studies on identical replicate
/// data (paired comparison).
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SimFile {
    Ml(ParamSim),
    Bayes(ParamSim),
    Both(ParamSim),
    Reliability(RelSim),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamSim {
    sigma: f64,
    pi: f64,
    sizes: Vec<usize>,
    #[serde(default = "default_replicates")]
    replicates: usize,
    #[serde(default = "default_level")]
    level: f64,
    seed: u64,
    #[serde(default)]
    prior: Option<PriorFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelSim {
    sigma1: f64,
    pi1: f64,
    sigma2: f64,
    pi2: f64,
    sizes: Vec<(usize, usize)>,
    #[serde(default = "default_replicates")]
    replicates: usize,
    #[serde(default = "default_posterior_draws")]
    posterior_draws: usize,
    #[serde(default = "default_level")]
    level: f64,
    seed: u64,
    #[serde(default)]
    prior_strength: Option<PriorFile>,
    #[serde(default)]
    prior_stress: Option<PriorFile>,
}

/// Either `preset = true` (hyper-parameters anchored at the generating
/// values, available on the study grid) or all four values explicit.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorFile {
    #[serde(default)]
    preset: bool,
    tau: Option<f64>,
    delta: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

impl PriorFile {
    fn resolve(&self, sigma: f64, pi: f64) -> CliResult<PriorSpec> {
        let explicit = [self.tau, self.delta, self.alpha, self.beta];
        if self.preset {
            if explicit.iter().any(Option::is_some) {
                return Err(CliError::input(
                    "prior: `preset = true` and explicit hyper-parameters are mutually exclusive",
                ));
            }
            return PriorSpec::informative_for(sigma, pi).ok_or_else(|| {
                CliError::input(format!(
                    "no informative preset for sigma={sigma}, pi={pi}; \
                     specify tau/delta/alpha/beta explicitly"
                ))
            });
        }
        match explicit {
            [Some(tau), Some(delta), Some(alpha), Some(beta)] => {
                Ok(PriorSpec::new(tau, delta, alpha, beta)?)
            }
            _ => {
                Err(CliError::input("prior: set `preset = true` or all of tau, delta, alpha, beta"))
            }
        }
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let started = Instant::now();
    let started_unix_ms =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0);
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::input(format!("{}: {e}", args.config.display())))?;
    let is_json = args.config.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let file: SimFile = if is_json {
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", args.config.display())))?
    } else {
        toml::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", args.config.display())))?
    };

    std::fs::create_dir_all(&args.out_dir)?;
    let stem = args
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "study".into());

    let (seed, table_path) = match &file {
        SimFile::Ml(p) => {
            let cfg = param_config(p, false)?;
            let rows = run_ml_study(&cfg)?;
            let path = args.out_dir.join(format!("{stem}_params.csv"));
            write_param_rows_csv(&rows, create(&path)?)?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
            (p.seed, path)
        }
        SimFile::Bayes(p) => {
            let cfg = param_config(p, true)?;
            let rows = run_bayes_study(&cfg)?;
            let path = args.out_dir.join(format!("{stem}_params.csv"));
            write_param_rows_csv(&rows, create(&path)?)?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
            (p.seed, path)
        }
        SimFile::Both(p) => {
            let cfg = param_config(p, true)?;
            let mut rows = run_ml_study(&cfg)?;
            rows.extend(run_bayes_study(&cfg)?);
            let path = args.out_dir.join(format!("{stem}_params.csv"));
            write_param_rows_csv(&rows, create(&path)?)?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
            (p.seed, path)
        }
        SimFile::Reliability(r) => {
            let priors =
                match (&r.prior_strength, &r.prior_stress) {
                    (Some(a), Some(b)) => {
                        Some((a.resolve(r.sigma1, r.pi1)?, b.resolve(r.sigma2, r.pi2)?))
                    }
                    (None, None) => None,
                    _ => return Err(CliError::input(
                        "reliability study: give both prior_strength and prior_stress, or neither",
                    )),
                };
            let cfg = ReliabilityStudyConfig {
                sigma1: r.sigma1,
                pi1: r.pi1,
                sigma2: r.sigma2,
                pi2: r.pi2,
                sizes: r.sizes.clone(),
                replicates: r.replicates,
                priors,
                n_posterior_draws: r.posterior_draws,
                level: r.level,
                seed: r.seed,
            };
            let rows = run_reliability_study(&cfg)?;
            let path = args.out_dir.join(format!("{stem}_reliability.csv"));
            write_reliability_rows_csv(&rows, create(&path)?)?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
            (r.seed, path)
        }
    };

    let manifest = RunManifest {
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(&file)
            .map_err(|e| CliError::input(format!("serialization failed: {e}")))?,
        started_unix_ms,
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    let manifest_path = args.out_dir.join(format!("{stem}_manifest.json"));
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    std::fs::write(&manifest_path, text + "\n")?;
    println!("wrote {}", manifest_path.display());
    let _ = table_path;
    Ok(())
}

fn param_config(p: &ParamSim, need_prior: bool) -> CliResult<ParamStudyConfig> {
    let prior = match &p.prior {
        Some(pf) => Some(pf.resolve(p.sigma, p.pi)?),
        None if need_prior => {
            return Err(CliError::input("this study kind needs a [prior] section"))
        }
        None => None,
    };
    Ok(ParamStudyConfig {
        sigma: p.sigma,
        pi: p.pi,
        sizes: p.sizes.clone(),
        replicates: p.replicates,
        prior,
        level: p.level,
        seed: p.seed,
    })
}

fn create(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

pub fn trace(args: &TraceArgs) -> CliResult<()> {
    if args.chains < 2 {
        return Err(CliError::input("convergence diagnostics need at least 2 chains"));
    }
    let sample = data::load_one_group(&args.input, args.scale)?;
    let prior =
        PriorSpec::new(args.prior_tau, args.prior_delta, args.prior_alpha, args.prior_beta)?;
    let opts = McmcOptions {
        chains: args.chains,
        draws: args.draws,
        warmup: args.warmup,
        seed: args.seed,
    };
    let summary = metropolis_check(&sample, &prior, &opts)?;

    // Matching number of exact-sampler draws for side-by-side comparison.
    let post = posterior(&sample, &prior)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed ^ 0x9e37_79b9_7f4a_7c15);
    let total = summary.sigma_draws.len();

    let mut w = csv::Writer::from_writer(create(&args.out)?);
    w.write_record(["source", "chain", "iter", "sigma", "pi"])
        .map_err(|e| CliError::input(format!("CSV write failed: {e}")))?;
    let per_chain = total / args.chains;
    for (i, (s, p)) in summary.sigma_draws.iter().zip(&summary.pi_draws).enumerate() {
        let chain = i / per_chain + 1;
        let iter = i % per_chain + 1;
        w.write_record([
            "mcmc".to_string(),
            chain.to_string(),
            iter.to_string(),
            format!("{s}"),
            format!("{p}"),
        ])
        .map_err(|e| CliError::input(format!("CSV write failed: {e}")))?;
    }
    for iter in 1..=total {
        let (s, p) = post.draw(&mut rng);
        w.write_record([
            "exact".to_string(),
            "0".to_string(),
            iter.to_string(),
            format!("{s}"),
            format!("{p}"),
        ])
        .map_err(|e| CliError::input(format!("CSV write failed: {e}")))?;
    }
    w.flush()?;

    println!(
        "sigma  mean {:.4}  sd {:.4}  rhat {:.4}  ess {:.1}  mcse {:.5}",
        summary.sigma_mean,
        summary.sigma_sd,
        summary.sigma_rhat,
        summary.sigma_ess,
        summary.sigma_mcse
    );
    println!(
        "pi     mean {:.4}  sd {:.4}  rhat {:.4}  ess {:.1}  mcse {:.5}",
        summary.pi_mean, summary.pi_sd, summary.pi_rhat, summary.pi_ess, summary.pi_mcse
    );
    println!("accept rate {:.3}", summary.accept_rate);
    println!("trace          {}", args.out.display());
    if !summary.converged() {
        eprintln!(
            "warning: split-Rhat exceeds 1.01 (sigma {:.4}, pi {:.4}); chains may not have mixed",
            summary.sigma_rhat, summary.pi_rhat
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let first = LogLindley::new(args.sigma, args.pi)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let xs: Sample = first.sample(args.m, &mut rng)?;

    let two_group = match (args.sigma2, args.pi2, args.n) {
        (Some(s2), Some(p2), Some(n)) => {
            let second = LogLindley::new(s2, p2)?;
            Some(second.sample(n, &mut rng)?)
        }
        (None, None, None) => None,
        _ => {
            return Err(CliError::input(
                "two-group generation needs all of --sigma2, --pi2, and -n",
            ))
        }
    };

    let write_to = |out: Box<dyn Write>| -> CliResult<()> {
        match &two_group {
            Some(ys) => data::write_two_group(&[("A", xs.values()), ("B", ys.values())], out),
            None => data::write_one_group(xs.values(), out),
        }
    };
    match &args.out {
        Some(path) => write_to(Box::new(create(path)?))?,
        None => write_to(Box::new(std::io::stdout().lock()))?,
    }
    Ok(())
}
