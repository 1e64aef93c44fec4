mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wsrpt_core::adversary::{self, Equalizer, FixedFirst, Game};
use wsrpt_core::analysis;
use wsrpt_core::fuzz::{fuzz, FuzzConfig};
use wsrpt_core::instances::{
    gen_basic, gen_nested, gen_random, instance_to_json, read_instance, JobClass, NestedParams, RandomRanges,
    ScenarioParams,
};
use wsrpt_core::numeric::{format_rational, parse_rational, to_f64, Rational};
use wsrpt_core::oracle::{
    common_grid, optimal_bruteforce, optimal_dp_timeindexed, structured_optimal, DEFAULT_MAX_N, DEFAULT_STATE_BUDGET,
};
use wsrpt_core::render::{render_gantt, render_profile};
use wsrpt_core::simulator::{default_tie, simulate, OnlinePolicy, Priority, PriorityPolicy, TieRule};
use wsrpt_core::{objective, Instance, JobId, Schedule};

/// Exit code for a failed check, as opposed to invalid input.
const ASSERTION: u8 = 2;

#[derive(Debug)]
struct Breach(String);

impl std::fmt::Display for Breach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Breach {}

#[derive(Parser, Debug)]
#[command(name = "wsrpt", version, about = "Preemptive weighted completion time workbench")]
struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print values as exact rationals (default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Print values as floating-point numbers.
    #[arg(long, global = true)]
    float: bool,
    /// Output file. Without it, output goes to `$WSRPT_OUT_DIR/<default name>`
    /// if that is set, else to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` lines used as defaults for flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PolicyName {
    Wsrpt,
    WsptPreemptive,
    Srpt,
    /// Second long job whenever available (adversary only).
    SecondFirst,
    /// Brings both long jobs to the same fraction left (adversary only).
    Equalizer,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TieName {
    PreferRunning,
    PreferNewLongest,
    PreferNewShortest,
    /// The instance's own tie script.
    Scripted,
    ExhaustiveWorst,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum OptMethod {
    Bruteforce,
    Timeindexed,
    Structured,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Class {
    General,
    UnitWeight,
    ZeroRelease,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Target {
    Basic,
    Lb,
    Nested,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Figure {
    Gantt,
    Profile,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run an online policy on an instance file.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "wsrpt")]
        policy: PolicyName,
        /// Defaults to the instance's tie script if it has one, else prefer-running.
        #[arg(long, value_enum)]
        tie: Option<TieName>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also write the instance as read.
        #[arg(long)]
        instance_out: Option<PathBuf>,
    },
    /// Optimal schedule of an instance file.
    Optimal {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "bruteforce")]
        method: OptMethod,
        /// Grid for the time-indexed method; defaults to the finest common grid.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: GenCmd,
    },
    /// Recompute the published continuous-scenario table with deltas.
    Table1,
    /// Run one of the numerical optimizations.
    Optimize {
        #[arg(value_enum)]
        target: Target,
        /// Start time of the inner segment (nested only; optimized when absent).
        #[arg(long)]
        r_s: Option<f64>,
    },
    /// Both lower-bound curves over the second job's length.
    Curves {
        #[arg(long, default_value_t = 1.05)]
        from: f64,
        #[arg(long, default_value_t = 10.0)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Play the two-job adversary against a policy.
    Adversary {
        #[arg(long, value_enum, default_value = "wsrpt")]
        policy: PolicyName,
        #[arg(long, value_enum, default_value = "prefer-running")]
        tie: TieName,
        #[arg(long, default_value = "1e-3")]
        delta: String,
        #[arg(long, default_value = "1")]
        p1: String,
        #[arg(long, default_value = "2.3364")]
        p2: String,
        /// Fraction left on each long job by the equalizer.
        #[arg(long, default_value = "0.6")]
        lambda: String,
    },
    /// Random search for bad worst-case tie-breaking ratios.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// Directory for the worst instance found.
        #[arg(long)]
        certificate_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1.2259 + 1e-6)]
        envelope: f64,
    },
    /// Draw a schedule as SVG.
    Render {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "wsrpt")]
        policy: PolicyName,
        #[arg(long, value_enum)]
        tie: Option<TieName>,
        /// Draw the optimal schedule instead of the policy's.
        #[arg(long)]
        optimal: bool,
    },
}

#[derive(Subcommand, Debug)]
enum GenCmd {
    /// Long job plus floor, wall and block of small jobs.
    Basic {
        #[arg(long)]
        y: f64,
        #[arg(long)]
        v: Option<f64>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
    /// Scaled basic scenario started inside an outer floor.
    Nested {
        #[arg(long, default_value_t = 0.5307)]
        r_s: f64,
        #[arg(long)]
        p_s: f64,
        #[arg(long, default_value_t = 0.8157)]
        inner_y: f64,
        #[arg(long)]
        inner_v: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
    /// Seeded random instance on a quarter grid.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "general")]
        class: Class,
    },
}

struct Out {
    path: Option<PathBuf>,
    float: bool,
}

impl Out {
    fn num(&self, x: &Rational) -> Value {
        if self.float {
            json!(to_f64(x))
        } else {
            json!(format_rational(x))
        }
    }

    fn target(&self, default_name: &str) -> Option<PathBuf> {
        self.path
            .clone()
            .or_else(|| std::env::var_os("WSRPT_OUT_DIR").map(|d| PathBuf::from(d).join(default_name)))
    }

    fn write(&self, default_name: &str, text: &str) -> Result<()> {
        match self.target(default_name) {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn json(&self, default_name: &str, v: &Value) -> Result<()> {
        self.write(default_name, &(serde_json::to_string_pretty(v)? + "\n"))
    }
}

fn tie_rule(tie: Option<TieName>, instance: Option<&Instance>) -> Result<TieRule> {
    Ok(match tie {
        None => instance.map(default_tie).unwrap_or(TieRule::PreferRunning),
        Some(TieName::PreferRunning) => TieRule::PreferRunning,
        Some(TieName::PreferNewLongest) => TieRule::PreferNewLongest,
        Some(TieName::PreferNewShortest) => TieRule::PreferNewShortest,
        Some(TieName::ExhaustiveWorst) => TieRule::ExhaustiveWorst,
        Some(TieName::Scripted) => match instance.and_then(|i| i.tie_script.clone()) {
            Some(s) => TieRule::Scripted(s),
            None => bail!("scripted ties need an instance with a tie script"),
        },
    })
}

fn priority(policy: PolicyName) -> Result<Priority> {
    Ok(match policy {
        PolicyName::Wsrpt => Priority::Wsrpt,
        PolicyName::WsptPreemptive => Priority::WsptPreemptive,
        PolicyName::Srpt => Priority::Srpt,
        other => bail!("policy {other:?} only plays the adversary game"),
    })
}

fn load(path: &std::path::Path) -> Result<Instance> {
    read_instance(path).with_context(|| format!("reading instance {}", path.display()))
}

fn rational(s: &str, what: &str) -> Result<Rational> {
    parse_rational(s).with_context(|| format!("invalid {what}"))
}

fn run_policy(instance: &Instance, policy: PolicyName, tie: Option<TieName>) -> Result<Schedule> {
    Ok(simulate(instance, priority(policy)?, &tie_rule(tie, Some(instance))?)?)
}

fn schedule_json(out: &Out, s: &Schedule) -> Value {
    Value::Array(
        s.slices
            .iter()
            .map(|x| json!({"job": x.job.0, "start": out.num(&x.start), "end": out.num(&x.end)}))
            .collect(),
    )
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn run(cli: Cli) -> Result<()> {
    let out = Out { path: cli.out.clone(), float: cli.float };
    match cli.command {
        Cmd::Simulate { instance, policy, tie, format, instance_out } => {
            let inst = load(&instance)?;
            if let Some(p) = instance_out {
                std::fs::write(p, instance_to_json(&inst)?)?;
            }
            let s = run_policy(&inst, policy, tie)?;
            let obj = objective(&s, &inst)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    s.write_csv(&mut buf)?;
                    out.write("schedule.csv", &String::from_utf8(buf)?)
                }
                Format::Json => out.json(
                    "schedule.json",
                    &json!({"policy": format!("{policy:?}"), "objective": out.num(&obj), "schedule": schedule_json(&out, &s)}),
                ),
            }
        }
        Cmd::Optimal { instance, method, grid, max_n } => {
            let inst = load(&instance)?;
            let r = match method {
                OptMethod::Bruteforce => optimal_bruteforce(&inst, max_n)?,
                OptMethod::Structured => structured_optimal(&inst)?,
                OptMethod::Timeindexed => {
                    let g = match grid {
                        Some(g) => rational(&g, "grid")?,
                        None => common_grid(&inst),
                    };
                    optimal_dp_timeindexed(&inst, &g, DEFAULT_STATE_BUDGET)?
                }
            };
            out.json(
                "optimal.json",
                &json!({"method": r.method, "objective": out.num(&r.objective), "schedule": schedule_json(&out, &r.schedule)}),
            )
        }
        Cmd::Gen { family } => {
            let inst = match family {
                GenCmd::Basic { y, v, z, delta } => gen_basic(&ScenarioParams::new(y, v, z, delta)?)?,
                GenCmd::Nested { r_s, p_s, inner_y, inner_v, delta } => {
                    gen_nested(&NestedParams::standard(r_s, p_s, inner_y, inner_v, delta)?)?
                }
                GenCmd::Random { n, class } => {
                    let class = match class {
                        Class::General => JobClass::General,
                        Class::UnitWeight => JobClass::UnitWeight,
                        Class::ZeroRelease => JobClass::ZeroRelease,
                    };
                    gen_random(n, cli.seed, &RandomRanges::default().with_class(class))?
                }
            };
            for w in &inst.tags.warnings {
                eprintln!("warning: {w}");
            }
            out.write("instance.json", &(instance_to_json(&inst)? + "\n"))
        }
        Cmd::Table1 => {
            let rows = analysis::table1()?;
            let f = |x: f64| format!("{x:.6}");
            let opt = |x: Option<f64>| x.map(f).unwrap_or_default();
            let mut header = vec!["y", "v", "z", "C", "C_star", "ratio", "W", "L"];
            header.extend(["C_printed", "C_star_printed", "ratio_printed", "W_printed", "L_printed"]);
            header.extend(["dC", "dC_star", "dratio", "dW", "dL", "note"]);
            let text = csv_text(
                &header,
                rows.iter().map(|r| {
                    let m = &r.computed;
                    let mut v = vec![f(r.y), opt(r.v), opt(r.z)];
                    v.extend([m.c, m.c_star, m.ratio, m.w, m.l].map(f));
                    v.extend(r.printed.map(|x| format!("{x:.4}")));
                    v.extend(r.deltas.map(|d| format!("{d:.2e}")));
                    v.push(r.note.clone().unwrap_or_default());
                    v
                }),
            )?;
            out.write("table1.csv", &text)?;
            let worst = rows.iter().map(|r| r.max_abs_delta()).fold(0.0, f64::max);
            if worst >= 1e-3 {
                return Err(Breach(format!("largest table delta {worst:.2e} reaches 1e-3")).into());
            }
            Ok(())
        }
        Cmd::Optimize { target, r_s } => {
            let v = match target {
                Target::Basic => json!(analysis::optimize_basic()),
                Target::Lb => {
                    let (p2, ratio) = analysis::optimize_lb();
                    let x = analysis::lb_intersection(1.0)?;
                    json!({"p2": p2, "ratio": ratio, "crossing": x,
                        "middle_bound_early": analysis::middle_bound_early(1.0, p2),
                        "middle_bound_late": analysis::middle_bound_late(1.0, p2)})
                }
                Target::Nested => {
                    let b = analysis::optimize_basic();
                    let inner = analysis::closed_metrics(b.y, Some(b.v), None)?;
                    let best = match r_s {
                        Some(r) => analysis::optimize_p_s(r, &inner),
                        None => analysis::optimize_nested(&inner),
                    };
                    json!({"inner": b, "nested": best})
                }
            };
            out.json("optimize.json", &v)
        }
        Cmd::Curves { from, to, points } => {
            if points < 2 || !(from > 1.0 && to > from) {
                bail!("need 1 < from < to and at least two points");
            }
            let p2s: Vec<f64> = (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect();
            let curves = analysis::lb_curves(1.0, &p2s)?;
            let text = csv_text(
                &["p2", "c1", "c2"],
                curves.iter().map(|c| vec![format!("{:.6}", c.p2), format!("{:.8}", c.c1), format!("{:.8}", c.c2)]),
            )?;
            out.write("fig4.csv", &text)
        }
        Cmd::Adversary { policy, tie, delta, p1, p2, lambda } => {
            let game = Game { p1: rational(&p1, "p1")?, p2: rational(&p2, "p2")?, delta: rational(&delta, "delta")? };
            let tie = tie_rule(Some(tie), None)?;
            let player: Box<dyn OnlinePolicy> = match policy {
                PolicyName::SecondFirst => Box::new(FixedFirst::new(JobId(1))),
                PolicyName::Equalizer => Box::new(Equalizer::new(rational(&lambda, "lambda")?)),
                p => Box::new(PriorityPolicy::new(priority(p)?, tie)),
            };
            let t = adversary::play(player, &game)?;
            let mut v = serde_json::to_value(&t)?;
            v["policy"] = json!(format!("{policy:?}"));
            if out.float {
                v["online"] = out.num(&t.online);
                v["optimal"] = out.num(&t.optimal);
            }
            out.json("transcript.json", &v)
        }
        Cmd::Fuzz { trials, n_max, certificate_dir, envelope } => {
            let cfg = FuzzConfig {
                trials,
                n_max,
                seed: cli.seed,
                certificate_dir: certificate_dir.or_else(|| std::env::var_os("WSRPT_OUT_DIR").map(PathBuf::from)),
                envelope,
                ..FuzzConfig::default()
            };
            let rep = fuzz(&cfg)?;
            out.json("fuzz.json", &json!(rep))?;
            if rep.breached {
                return Err(Breach(format!("ratio {} exceeds {}", rep.worst_ratio, rep.envelope)).into());
            }
            Ok(())
        }
        Cmd::Render { figure, instance, policy, tie, optimal } => {
            let inst = load(&instance)?;
            let s = if optimal {
                match structured_optimal(&inst) {
                    Ok(r) => r.schedule,
                    Err(_) => optimal_bruteforce(&inst, DEFAULT_MAX_N)?.schedule,
                }
            } else {
                run_policy(&inst, policy, tie)?
            };
            let (svg, name) = match figure {
                Figure::Gantt => (render_gantt(&s, &inst)?, "gantt.svg"),
                Figure::Profile => (render_profile(&s, &inst)?, "profile.svg"),
            };
            out.write(name, &svg)
        }
    }
}

fn parse(args: Vec<String>) -> Result<Cli, clap::Error> {
    let cmd = Cli::command();
    let matches = cmd.clone().try_get_matches_from(&args)?;
    let cli = Cli::from_arg_matches(&matches)?;
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let mut names = Vec::new();
    let mut m = &matches;
    while let Some((name, sub)) = m.subcommand() {
        names.push(name.to_string());
        m = sub;
    }
    let merged = config::read(&path)
        .and_then(|entries| config::merge(&args, &entries, &cmd, &names))
        .map_err(|e| cmd.clone().error(clap::error::ErrorKind::InvalidValue, e.to_string()))?;
    Cli::try_parse_from(merged)
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args().collect()) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Breach>().is_some() {
                ExitCode::from(ASSERTION)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

