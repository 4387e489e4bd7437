use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use img_core::arithmodel::{
    model_from_tower, order_growth_rows, ArithLevelModel, GrowthRow, ModelOptions, ModelStats, ModelTower,
    CACHE_SYSTEM,
};
use img_core::constantfield::radical_sweep;
use img_core::maximality::{maximality_verdict, BasePoint, Verdict};
use img_core::polyarith::{discriminant_shape, iterate_metadata, DiscriminantShape, MAX_DISC_LEVEL};
use img_core::report::Report;
use img_core::selfsim::{cache, GeometricLevel};
use img_core::suite::{run_verify, SuiteConfig};
use img_core::treeauto::MAX_LEVEL;
use img_core::{Error, Result};

mod config;

use config::Caps;

#[derive(Parser, Debug)]
#[command(name = "img", version, about = "Iterated monodromy groups of f(x) = 2/(x-1)^2")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Directory for advisory group caches.
    #[arg(long, global = true, env = "IMG_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// `key = value` file overriding the default caps.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orders, indices and centralisers in the geometric group at one level.
    Group {
        #[arg(long, default_value_t = 4)]
        level: usize,
    },
    /// Summary of the arithmetic model and its growth table.
    Arith {
        #[arg(long, default_value_t = 4)]
        level: usize,
        #[arg(long)]
        allow_level6: bool,
    },
    /// Discriminant shapes of the iterates.
    Disc {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Level-4 maximality verdict for a rational base point.
    Maximality {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        prime_bound: Option<u64>,
    },
    /// Residuals of the radical identities at seeded base points.
    Radical {
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every invariant suite.
    Verify {
        /// Quick mode: cap every suite at this level.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        prime_bound: Option<u64>,
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Outcome {
    Ok,
    Failed(Vec<String>),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::ExcludedBasePoint(_) | Error::BadPrime { .. } | Error::InsufficientData(_) => 2,
        Error::ResourceLimit { .. } => 3,
        _ => 1,
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serialisable")),
        Format::Text => print!("{}", text()),
    }
}

#[derive(Serialize)]
struct GroupSummary {
    level: usize,
    order: usize,
    index_h1: usize,
    index_h2: usize,
    index_h3: usize,
    index_u: usize,
    index_commutator: usize,
    u_abelian: bool,
    abelian_invariants: Vec<u64>,
    centralizer_orders: [usize; 3],
    center_order: usize,
}

fn run_group(level: usize, caps: &Caps, format: Format) -> Result<Outcome> {
    if level == 0 || level > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!("--level must be in 1..={MAX_LEVEL}")));
    }
    if level > caps.group_level.max(MAX_LEVEL.min(7)) {
        return Err(Error::ResourceLimit {
            what: format!("group level {level}"),
            cap: caps.group_level as u64,
        });
    }
    let geo = GeometricLevel::compute(level)?;
    let g = &geo.g;
    let s = GroupSummary {
        level,
        order: g.order(),
        index_h1: g.index_of(&geo.h[0])?,
        index_h2: g.index_of(&geo.h[1])?,
        index_h3: g.index_of(&geo.h[2])?,
        index_u: g.index_of(&geo.u)?,
        index_commutator: g.index_of(&geo.derived)?,
        u_abelian: geo.u.is_abelian(),
        abelian_invariants: g.abelian_invariants()?,
        centralizer_orders: [
            g.centralizer(&geo.a1)?.order(),
            g.centralizer(&geo.a2)?.order(),
            g.centralizer(&geo.a3)?.order(),
        ],
        center_order: g.center()?.order(),
    };
    emit(format, &s, || {
        format!(
            "level               {}\n|G|                 {} = 2^{}\n[G:H1] [G:H2] [G:H3] {} {} {}\n[G:U]               {}\n[G:[G,G]]           {}\nU abelian           {}\nabelian invariants  {:?}\n|C(a1)| |C(a2)| |C(a3)| {} {} {}\n|Z(G)|              {}\n",
            s.level,
            s.order,
            s.order.trailing_zeros(),
            s.index_h1,
            s.index_h2,
            s.index_h3,
            s.index_u,
            s.index_commutator,
            s.u_abelian,
            s.abelian_invariants,
            s.centralizer_orders[0],
            s.centralizer_orders[1],
            s.centralizer_orders[2],
            s.center_order
        )
    });
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct ArithSummary {
    level: usize,
    m_order: usize,
    g_order: usize,
    u_order: usize,
    frattini_order: usize,
    frattini_rank: u32,
    maximal_subgroups: Vec<String>,
    stats: ModelStats,
    growth: Vec<GrowthRow>,
}

fn cache_model_parts(dir: &std::path::Path, model: &ArithLevelModel) {
    let n = model.level;
    let _ = cache::write_group(&cache::cache_path(dir, CACHE_SYSTEM, "Frattini(M)", n), "Frattini(M)", &model.frattini);
    for (i, h) in model.maximal_subgroups.iter().enumerate() {
        let name = ArithLevelModel::maximal_subgroup_name(i);
        let _ = cache::write_group(&cache::cache_path(dir, CACHE_SYSTEM, &name, n), &name, h);
    }
}

fn run_arith(level: usize, allow_level6: bool, caps: &Caps, format: Format) -> Result<Outcome> {
    let opts = ModelOptions {
        allow_level6: allow_level6 || caps.allow_level6,
    };
    if level > caps.model_level && !(level == 6 && opts.allow_level6) {
        return Err(Error::ResourceLimit {
            what: format!("arithmetic model at level {level}"),
            cap: caps.model_level as u64,
        });
    }
    let tower = ModelTower::build_cached(level, opts, caps.cache_dir.as_deref())?;
    let model = model_from_tower(&tower, level)?;
    if let Some(dir) = &caps.cache_dir {
        cache_model_parts(dir, &model);
    }
    let s = ArithSummary {
        level,
        m_order: model.m.order(),
        g_order: model.g.order(),
        u_order: model.u.order(),
        frattini_order: model.frattini.order(),
        frattini_rank: (model.m.order() / model.frattini.order()).trailing_zeros(),
        maximal_subgroups: (0..model.maximal_subgroups.len())
            .map(ArithLevelModel::maximal_subgroup_name)
            .collect(),
        stats: model.stats,
        growth: order_growth_rows(&tower),
    };
    emit(format, &s, || {
        let mut out = format!(
            "level {}: |M| = {}, |G| = {}, |U| = {}, |Frattini(M)| = {} (rank {}), {} maximal subgroups\n",
            s.level,
            s.m_order,
            s.g_order,
            s.u_order,
            s.frattini_order,
            s.frattini_rank,
            s.maximal_subgroups.len()
        );
        out.push_str(&format!(
            "candidates {}, normalising G {}, dropped by the U filter {}{}\n",
            s.stats.candidates,
            s.stats.normalise_g,
            s.stats.dropped_by_u_filter,
            if s.stats.from_cache { " (from cache)" } else { "" }
        ));
        out.push_str("n  |G_n|  |M_n|  2^(2n)  |M_n|/|M_(n-1)|  log2|M_n|/(2^n-1)\n");
        for r in &s.growth {
            let ratio = r.step_ratio.map_or("-".to_string(), |x| format!("{x}"));
            out.push_str(&format!(
                "{}  {}  {}  {}  {}  {:.4}\n",
                r.n, r.g_order, r.m_order, r.bound, ratio, r.density
            ));
        }
        out
    });
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct DiscRow {
    n: usize,
    shape: String,
    parts: DiscriminantShape,
    m: usize,
    delta: usize,
    epsilon: usize,
    q: usize,
    d: String,
}

fn run_disc(n: Option<usize>, caps: &Caps, format: Format) -> Result<Outcome> {
    let levels: Vec<usize> = match n {
        Some(n) if (1..=MAX_DISC_LEVEL).contains(&n) => vec![n],
        Some(n) => return Err(Error::InvalidArgument(format!("--n must be in 1..={MAX_DISC_LEVEL}, got {n}"))),
        None => (1..=caps.disc_level.clamp(1, MAX_DISC_LEVEL)).collect(),
    };
    let rows = levels
        .into_iter()
        .map(|n| {
            let shape = discriminant_shape(n)?;
            let meta = iterate_metadata(n)?;
            Ok(DiscRow {
                n,
                shape: shape.to_string(),
                parts: shape,
                m: meta.m,
                delta: meta.delta,
                epsilon: meta.epsilon,
                q: meta.q,
                d: meta.d.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(format, &rows, || {
        rows.iter()
            .map(|r| format!("{}\n", r.shape))
            .collect::<String>()
    });
    Ok(Outcome::Ok)
}

fn run_maximality(a: &str, prime_bound: Option<u64>, caps: &Caps, format: Format) -> Result<Outcome> {
    let a = BasePoint::parse(a)?;
    let v = maximality_verdict(&a, prime_bound.unwrap_or(caps.prime_bound))?;
    emit(format, &v, || {
        let verdict = serde_json::to_value(v.verdict).unwrap();
        let mut out = format!("a = {}\nverdict: {}\n", v.a, verdict.as_str().unwrap());
        if let Some(dep) = &v.square_class.dependency {
            out.push_str(&format!("square classes dependent: {}\n", dep.join(" * ")));
        }
        for e in &v.eliminations {
            out.push_str(&format!("  {} eliminated at p = {} by {}\n", e.subgroup, e.prime, e.profile));
        }
        if let Some(reason) = &v.reason {
            out.push_str(&format!("reason: {reason}\n"));
        }
        if v.verdict == Verdict::Inconclusive {
            out.push_str(&format!("surviving: {}\n", v.surviving.join(", ")));
        }
        out.push_str(&format!("primes tried: {}\n", v.primes_tried));
        out
    });
    Ok(Outcome::Ok)
}

fn run_radical(caps: &Caps, format: Format) -> Result<Outcome> {
    if caps.precision < 32 {
        return Err(Error::InvalidArgument("--precision must be at least 32 bits".into()));
    }
    let sweep = radical_sweep(caps.samples, caps.seed, caps.precision)?;
    emit(format, &sweep, || {
        let mut out = String::new();
        for r in &sweep.reports {
            out.push_str(&format!("t0 = {:.6} {:+.6}i\n", r.t0.0, r.t0.1));
            for i in &r.identities {
                out.push_str(&format!(
                    "  [{}] {}: {:.3e}\n",
                    if i.passed { "pass" } else { "FAIL" },
                    i.id,
                    i.max_residual
                ));
            }
        }
        out
    });
    Ok(if sweep.all_passed() {
        Outcome::Ok
    } else {
        Outcome::Failed(vec!["radical identities".into()])
    })
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    passed: bool,
    count: usize,
    claims: &'a Report,
}

fn run_verify_cmd(cfg: SuiteConfig, format: Format) -> Result<Outcome> {
    let report = run_verify(&cfg)?;
    let summary = VerifySummary {
        passed: report.all_passed(),
        count: report.checks.len(),
        claims: &report,
    };
    emit(format, &summary, || {
        format!(
            "{report}{} claims, {}\n",
            summary.count,
            if summary.passed { "all passed" } else { "FAILURES" }
        )
    });
    let failed: Vec<String> = report.failures().map(|c| c.id.clone()).collect();
    Ok(if failed.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Failed(failed)
    })
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut caps = match &cli.config {
        Some(path) => Caps::load(path)?,
        None => Caps::default(),
    };
    if cli.cache_dir.is_some() {
        caps.cache_dir = cli.cache_dir.clone();
    }
    let format = cli.format;
    match cli.command {
        Command::Group { level } => run_group(level, &caps, format),
        Command::Arith { level, allow_level6 } => run_arith(level, allow_level6, &caps, format),
        Command::Disc { n } => run_disc(n, &caps, format),
        Command::Maximality { a, prime_bound } => run_maximality(&a, prime_bound, &caps, format),
        Command::Radical {
            precision,
            samples,
            seed,
        } => {
            caps.precision = precision.unwrap_or(caps.precision);
            caps.samples = samples.unwrap_or(caps.samples);
            caps.seed = seed.unwrap_or(caps.seed);
            run_radical(&caps, format)
        }
        Command::Verify {
            level,
            prime_bound,
            precision,
            samples,
            seed,
        } => {
            let mut cfg = match level {
                Some(0) => return Err(Error::InvalidArgument("--level must be >= 1".into())),
                Some(l) => SuiteConfig::quick(l.min(caps.group_level).min(MAX_LEVEL)),
                None => SuiteConfig {
                    group_level: caps.group_level,
                    model_level: caps.model_level,
                    disc_level: caps.disc_level,
                    samples: caps.samples,
                    ..SuiteConfig::default()
                },
            };
            cfg.prime_bound = prime_bound.unwrap_or(caps.prime_bound);
            cfg.precision = precision.unwrap_or(caps.precision);
            cfg.samples = samples.unwrap_or(cfg.samples);
            cfg.seed = seed.unwrap_or(caps.seed);
            cfg.cache_dir = caps.cache_dir.clone();
            cfg.allow_level6 = caps.allow_level6;
            run_verify_cmd(cfg, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(ids)) => {
            for id in ids {
                eprintln!("failed: {id}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
