use clap::{Args, Parser, Subcommand, ValueEnum};
use sparsecert::certify::{
    first_bound, loose_bound, noisy_loose_bound, noisy_tight_bound, tight_bound, BoundCertificate,
    CandidateSolution,
};
use sparsecert::dict_analysis::{g_constant, gamma_profile, has_unit_columns, kruskal_rank};
use sparsecert::experiment::{run_experiment, ExperimentConfig};
use sparsecert::matops::{read_matrix, read_vector, write_matrix, write_vector, Budget, DEFAULT_BUDGET};
use sparsecert::random_dict::{sparsity_curve, szarek_empirical_check, failure_probability_bound, RandomDictSpec};
use sparsecert::recover::{make_instance, sl0_solve, Sl0Params};
use sparsecert::tight_example::{theta0_degrees, TightExample};
use sparsecert::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Error certificates for sparse solutions of underdetermined linear systems.
#[derive(Parser)]
#[command(name = "sparsecert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArg {
    /// Maximum number of column subsets a single enumeration may visit.
    #[arg(long, env = "SPARSECERT_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Kruskal rank and the sigma_min / eta / gamma profile of a dictionary.
    Analyze {
        #[arg(long)]
        matrix: PathBuf,
        /// Profile depth; defaults to the Kruskal rank.
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        budget: BudgetArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the distance between a candidate and the sparsest solution.
    Certify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        shat: PathBuf,
        #[arg(long)]
        ell: usize,
        /// Noise level of the measurement, ||x - A s0|| <= eps.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Residual of the candidate, ||x - A s_hat|| <= delta.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = BoundArg::Tight)]
        bound: BoundArg,
        #[command(flatten)]
        budget: BudgetArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and verify the 2x3 equality example.
    TightExample {
        /// Angle in degrees, inside (0, theta0).
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        alpha: f64,
        /// Directory that receives matrix.txt, s0.txt, shat.txt and x.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded comparison of certified bounds against SL0 errors.
    Experiment {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0.1)]
        sigma_min: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        budget: BudgetArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Failure-probability bound for Gaussian dictionaries.
    ProbBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
    },
    /// Largest admissible sparsity ratio as a function of m/n.
    SparsityCurve {
        #[arg(long, default_value_t = 1.0)]
        beta_min: f64,
        #[arg(long, default_value_t = 10.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75, 1.0])]
        c: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo check of the extreme singular value tails.
    SzarekCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random sparse problem and an SL0 candidate to a directory.
    GenInstance {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        sigma_min: f64,
        /// Keep the raw Gaussian columns instead of normalizing them.
        #[arg(long)]
        raw_columns: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    First,
    Loose,
    Tight,
    NoisyLoose,
    NoisyTight,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::Parse { .. } | Error::Io(_) => 4,
        _ => 2,
    }
}

/// Six significant digits for human-readable summaries.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        format!("{x:.5e}")
    } else {
        format!("{x:.*}", (5 - mag) as usize)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(matrix: &Path, depth: Option<usize>, budget: Budget, out: Option<&Path>) -> Result<()> {
    let a = read_matrix(matrix)?;
    let kr = kruskal_rank(&a, budget);
    let depth = depth.unwrap_or(kr.q.max(1));
    let prof = gamma_profile(&a, depth, budget)?;
    eprintln!(
        "{} x {} dictionary: q = {}, spark = {}{}, unit-norm columns: {}",
        a.rows(),
        a.cols(),
        kr.q,
        kr.spark,
        if kr.complete { "" } else { " (budget-limited lower bound)" },
        prof.normalized
    );
    emit(out, &prof.to_csv())
}

#[allow(clippy::too_many_arguments)]
fn certify(
    matrix: &Path,
    shat: &Path,
    ell: usize,
    eps: f64,
    delta: f64,
    kind: BoundArg,
    budget: Budget,
    out: Option<&Path>,
) -> Result<BoundCertificate> {
    let a = read_matrix(matrix)?;
    let s = read_vector(shat)?;
    if s.len() != a.cols() {
        return Err(Error::InvalidInput(format!(
            "candidate has {} entries but the dictionary has {} columns",
            s.len(),
            a.cols()
        )));
    }
    let noiseless = matches!(kind, BoundArg::First | BoundArg::Loose | BoundArg::Tight);
    if noiseless && eps != 0.0 {
        return Err(Error::Precondition(format!(
            "eps = {eps} needs a noisy bound (noisy-loose or noisy-tight)"
        )));
    }
    let cand = CandidateSolution::new(s, delta)?;
    let cert = match kind {
        BoundArg::First => {
            // The G_A bound fixes its own order at n; only q is read here.
            let prof = gamma_profile(&a, 1, budget)?;
            let (g, _) = g_constant(&a, budget)?;
            first_bound(&prof, g, &cand)?
        }
        BoundArg::Loose => loose_bound(&gamma_profile(&a, ell, budget)?, &cand, ell)?,
        BoundArg::Tight => {
            tight_bound(&gamma_profile(&a, ell, budget)?, &cand, ell, has_unit_columns(&a))?
        }
        BoundArg::NoisyLoose => noisy_loose_bound(&gamma_profile(&a, ell, budget)?, &cand, ell, eps)?,
        BoundArg::NoisyTight => noisy_tight_bound(&a, &cand, ell, eps, budget)?,
    };
    let mut text = cert.to_json();
    text.push('\n');
    emit(out, &text)?;
    match cert.bound {
        Some(0.0) => eprintln!("bound = 0: uniqueness certified"),
        Some(b) => eprintln!("||s_hat - s0||_2 <= {}", sig6(b)),
        None => {
            let failed: Vec<String> = cert
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} ({})", c.name, c.detail))
                .collect();
            eprintln!("certificate withheld: {}", failed.join("; "));
        }
    }
    Ok(cert)
}

fn tight_example(theta: f64, alpha: f64, out: Option<&Path>) -> Result<()> {
    let t = TightExample::from_degrees(theta, alpha).map_err(|e| match e {
        Error::Domain(msg) => Error::Domain(format!("{msg}; theta0 = {:.4} deg", theta0_degrees())),
        other => other,
    })?;
    let as0 = t.a.mul_vec(&t.s0)?;
    let ash = t.a.mul_vec(&t.s_hat)?;
    let res0 = as0.iter().zip(&t.x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    let resh = ash.iter().zip(&t.x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    let prof = gamma_profile(&t.a, 2, Budget::default())?;
    let gamma_bar = prof.gamma_bar_seq[1];
    let closed = t.gamma_bar_closed_form();
    let bound = gamma_bar * t.alpha;
    let err = t.actual_error();
    let gap = (err - bound).abs() / bound;

    let mut s = String::new();
    let _ = writeln!(s, "theta = {} deg, alpha = {}, beta = {}", sig6(theta), sig6(alpha), sig6(t.beta));
    for i in 0..2 {
        let _ = writeln!(
            s,
            "A[{i}] = [{}, {}, {}]",
            sig6(t.a.get(i, 0)),
            sig6(t.a.get(i, 1)),
            sig6(t.a.get(i, 2))
        );
    }
    let ok1 = res0 < 1e-12 && resh < 1e-12;
    let ok2 = (gamma_bar - closed).abs() <= 1e-9 * closed && (prof.gamma_seq[1] - gamma_bar).abs() == 0.0;
    let ok3 = gap < 1e-9;
    let verdict = |b: bool| if b { "ok" } else { "FAILED" };
    let _ = writeln!(s, "check 1 (both solve A s = x): {} (residuals {res0:.1e}, {resh:.1e})", verdict(ok1));
    let _ = writeln!(
        s,
        "check 2 (gamma_bar = gamma_2 = sqrt(1 + 1/(1 - cos theta))): {} ({} vs {})",
        verdict(ok2),
        sig6(gamma_bar),
        sig6(closed)
    );
    let _ = writeln!(
        s,
        "check 3 (||s_hat - s0|| = gamma_bar alpha): {} ({} vs {}, relative gap {gap:.1e})",
        verdict(ok3),
        sig6(err),
        sig6(bound)
    );
    print!("{s}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_matrix(dir.join("matrix.txt"), &t.a)?;
        write_vector(dir.join("s0.txt"), &t.s0)?;
        write_vector(dir.join("shat.txt"), &t.s_hat)?;
        write_vector(dir.join("x.txt"), &t.x)?;
    }
    if ok1 && ok2 && ok3 {
        Ok(())
    } else {
        Err(Error::Precondition("tight example verification failed".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn gen_instance(
    n: usize,
    m: usize,
    p: usize,
    eps: f64,
    seed: u64,
    sigma_min: f64,
    normalize: bool,
    out: &Path,
) -> Result<()> {
    let inst = make_instance(n, m, p, eps, seed, normalize)?;
    let s_hat = sl0_solve(&inst.dictionary, &inst.x, &Sl0Params::new(sigma_min))?;
    std::fs::create_dir_all(out)?;
    write_matrix(out.join("matrix.txt"), &inst.dictionary)?;
    write_vector(out.join("x.txt"), &inst.x)?;
    write_vector(out.join("s0.txt"), &inst.s0)?;
    write_vector(out.join("shat.txt"), &s_hat)?;
    std::fs::write(out.join("instance.json"), inst.sidecar_json() + "\n")?;
    eprintln!("seed {seed}: wrote matrix.txt, x.txt, s0.txt, shat.txt, instance.json to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { matrix, depth, budget, out } => {
            analyze(&matrix, depth, Budget(budget.budget), out.as_deref())
        }
        Command::Certify { matrix, shat, ell, eps, delta, bound, budget, out } => {
            let cert = certify(&matrix, &shat, ell, eps, delta, bound, Budget(budget.budget), out.as_deref())?;
            if cert.is_certified() {
                Ok(())
            } else {
                Err(Error::Precondition("certificate withheld".into()))
            }
        }
        Command::TightExample { theta, alpha, out } => tight_example(theta, alpha, out.as_deref()),
        Command::Experiment { n, m, p, trials, sigma_min, seed, budget, out } => {
            let mut cfg = ExperimentConfig::new(n, m, p, trials, sigma_min, seed);
            cfg.budget = Budget(budget.budget);
            let r = run_experiment(&cfg)?;
            emit(out.as_deref(), &r.to_csv())?;
            let show = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| "n/a".into());
            eprintln!(
                "master seed {seed}: {trials} trials, {} failed; mean loose/actual = {}, mean tight/actual = {}, mean G_A-bound/actual = {}",
                r.failures(),
                show(r.mean_loose_ratio()),
                show(r.mean_tight_ratio()),
                show(r.mean_g_ratio())
            );
            Ok(())
        }
        Command::ProbBound { n, m, ell, r1, r2 } => {
            let rep = failure_probability_bound(&RandomDictSpec::new(n, m)?, ell, r1, r2)?;
            println!("{}", serde_json::to_string_pretty(&rep).expect("report is serializable"));
            eprintln!(
                "P(gamma_bar' > {}) <= {}{}; regime condition {}",
                sig6(rep.gamma_value),
                sig6(rep.failure_prob_rhs),
                if rep.vacuous { " (vacuous bound)" } else { "" },
                if rep.regime_ok { "holds" } else { "fails" }
            );
            Ok(())
        }
        Command::SparsityCurve { beta_min, beta_max, steps, c, out } => {
            let pts = sparsity_curve(beta_min, beta_max, steps, &c)?;
            let mut s = String::from("beta,c,u_star,residual,note\n");
            for p in pts {
                let note = if p.c == 1.0 { "c = 1 makes gamma infinite; supremum envelope only" } else { "" };
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e},{note}", p.beta, p.c, p.u_star, p.residual);
            }
            emit(out.as_deref(), &s)
        }
        Command::SzarekCheck { n, p, r, trials, seed, out } => {
            let rep = szarek_empirical_check(n, p, r, trials, seed)?;
            emit(out.as_deref(), &rep.to_csv())?;
            eprintln!(
                "master seed {seed}: freq(sigma_max > {}) = {}, freq(sigma_min < {}) = {}, allowed {}: {}",
                sig6(rep.max_threshold),
                sig6(rep.freq_max),
                sig6(rep.min_threshold),
                sig6(rep.freq_min),
                sig6(rep.tail_bound + rep.slack),
                if rep.passes() { "PASS" } else { "FAIL" }
            );
            Ok(())
        }
        Command::GenInstance { n, m, p, eps, seed, sigma_min, raw_columns, out } => {
            gen_instance(n, m, p, eps, seed, sigma_min, !raw_columns, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
