//! `hitfam`: generate, verify and bound d-hitting families of schedules.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hitfam::antichain::{bounds_report, greedy_family, random_family, Pool};
use hitfam::basic::{chain_event_family, dfs_family, warmup_family};
use hitfam::doubletree::{antichain_family_from_leaves, arbitrary_tree_family, build_m, tree_family};
use hitfam::harness::{format_family, parse_family, parse_poset, poset_stats, pruned_family, AnnotatedPoset, RunStats};
use hitfam::oracle::{is_d_hitting, DEFAULT_BUDGET};
use hitfam::pattern::{enumerate_patterns, pattern_family};
use hitfam::tree::CompleteTree;
use hitfam::{shapes, Error, Family, Poset};

/// Retries for verified random families.
const RANDOM_RETRIES: usize = 100;
/// Verification is attempted while `n (n-1) ... (n-d+1)` stays below
/// `budget` times this factor.
const VERIFY_FACTOR: u128 = 100;

#[derive(Parser)]
#[command(name = "hitfam", version, about = "Generate and verify d-hitting families of schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family for a built-in shape or a poset file.
    Gen(GenArgs),
    /// Check that a family file is d-hitting for a poset file.
    Verify {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        d: usize,
        /// Drop edges implied by other edges instead of rejecting them.
        #[arg(long)]
        repair: bool,
    },
    /// Print the antichain bounds as JSON.
    Bounds {
        #[arg(long, value_enum)]
        shape: ShapeKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Race-pruned family for a tree-shaped poset file (d = 3).
    Prune {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        repair: bool,
    },
    /// Print poset statistics as JSON.
    Stats {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        repair: bool,
    },
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum, conflicts_with = "poset", required_unless_present = "poset")]
    shape: Option<ShapeKind>,
    #[arg(long)]
    poset: Option<PathBuf>,
    #[arg(long, conflicts_with = "height")]
    n: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Candidates per step when the greedy method samples its pool.
    #[arg(long, default_value_t = 128)]
    samples: usize,
    /// Run the oracle on the result; exit 4 with a witness if it fails.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the enumerated patterns, one per line (pattern method only).
    #[arg(long)]
    dump_patterns: Option<PathBuf>,
    #[arg(long)]
    repair: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ShapeKind {
    Chain,
    Antichain,
    Tree,
    Doubletree,
    Chainplus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Dfs,
    Warmup,
    Doubletree,
    Pattern,
    Greedy,
    Random,
    Pruned,
    Interleave,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Dfs => "dfs",
            Method::Warmup => "warmup",
            Method::Doubletree => "doubletree",
            Method::Pattern => "pattern",
            Method::Greedy => "greedy",
            Method::Random => "random",
            Method::Pruned => "pruned",
            Method::Interleave => "interleave",
        }
    }
}

/// An error with the process exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Cycle(_) | Error::Reference(_) | Error::TransitiveEdge(..) => 2,
            Error::Infeasible { .. } | Error::PoolExhausted { .. } | Error::GenerationFailed { .. } => 3,
            Error::InvalidFamily(_) => 4,
            _ => 1,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn budget() -> Outcome<usize> {
    match std::env::var("HITFAM_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("HITFAM_BUDGET must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        msg: format!("cannot read {}: {e}", path.display()),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| usage(format!("cannot write output: {e}")))
        }
    }
}

fn load_poset(path: &Path, repair: bool) -> Outcome<AnnotatedPoset> {
    let text = read(path)?;
    parse_poset(&text, repair).map_err(|e| {
        let mut f = Failure::from(e);
        f.code = 2;
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    })
}

/// Runs the oracle if the tuple space is small enough; returns the report's
/// verdict and tuple count, or exit 4 with the missed tuple.
fn verify(p: &Poset, f: &Family, d: usize, budget: usize) -> Outcome<(bool, usize)> {
    let n = p.len() as u128;
    let space: u128 = (0..d.min(p.len()) as u128).map(|i| n - i).product();
    if space > budget as u128 * VERIFY_FACTOR {
        return Err(Error::Infeasible {
            what: "verification".into(),
            count: space,
            budget: budget as u128 * VERIFY_FACTOR,
        }
        .into());
    }
    let report = is_d_hitting(p, f, d)?;
    if let Some(t) = report.first_missed {
        return Err(Failure {
            code: 4,
            msg: format!(
                "family is not {d}-hitting; missed tuple: ({})",
                p.tuple_tokens(&t).join(", ")
            ),
        });
    }
    Ok((true, report.admissible_count))
}

struct Generated {
    poset: Poset,
    family: Family,
    comment: Option<String>,
}

fn shape_poset(shape: ShapeKind, n: Option<usize>, height: Option<usize>) -> Outcome<(Poset, usize)> {
    let name = format!("{shape:?}").to_lowercase();
    let need_n = || n.ok_or_else(|| usage(format!("--n is required for shape {name}")));
    let need_h = || height.ok_or_else(|| usage(format!("--height is required for shape {name}")));
    Ok(match shape {
        ShapeKind::Chain => (shapes::chain(need_n()?)?, need_n()?),
        ShapeKind::Antichain => (shapes::antichain(need_n()?)?, need_n()?),
        ShapeKind::Chainplus => (shapes::chain_plus_event(need_n()?)?, need_n()?),
        ShapeKind::Tree => (shapes::complete_tree(need_h()?)?, need_h()?),
        ShapeKind::Doubletree => (shapes::double_tree(need_h()?)?, need_h()?),
    })
}

fn generate(args: &GenArgs, budget: usize) -> Outcome<Generated> {
    if args.dump_patterns.is_some() && args.method != Method::Pattern {
        return Err(usage("--dump-patterns applies to the pattern method only"));
    }
    let (poset, shape, param, annotated) = match (&args.poset, args.shape) {
        (Some(path), _) => {
            let ap = load_poset(path, args.repair)?;
            (ap.poset.clone(), None, 0, Some(ap))
        }
        (None, Some(shape)) => {
            let (p, k) = shape_poset(shape, args.n, args.height)?;
            (p, Some(shape), k, None)
        }
        (None, None) => return Err(usage("either --shape or --poset is required")),
    };
    let d = args.d;
    let plain = |family: Family, poset: Poset| Generated {
        poset,
        family,
        comment: None,
    };
    let unsupported = || {
        usage(format!(
            "method {} does not apply to this input",
            args.method.name()
        ))
    };

    let g = match args.method {
        Method::Dfs => {
            if d != 2 {
                return Err(usage("the dfs family is 2-hitting only; use --d 2"));
            }
            plain(dfs_family(&poset)?, poset)
        }
        Method::Warmup => plain(warmup_family(&poset, d)?.family, poset),
        Method::Pruned => {
            let ap = annotated.ok_or_else(|| usage("method pruned needs --poset with race annotations"))?;
            plain(pruned_family(&ap, d)?.family, poset)
        }
        Method::Doubletree => {
            if !(2..=3).contains(&d) {
                return Err(usage("doubletree families are 3-hitting; use --d 2 or --d 3"));
            }
            match shape {
                Some(ShapeKind::Doubletree) => {
                    let m = build_m(param)?;
                    let comment = format!("M h={} block_width={}", m.h, m.block_width);
                    Generated {
                        family: m.family(),
                        poset: m.poset,
                        comment: Some(comment),
                    }
                }
                Some(ShapeKind::Tree) => {
                    let (p, f) = tree_family(param)?;
                    plain(f, p)
                }
                Some(ShapeKind::Antichain) if param >= 2 && param.is_power_of_two() => {
                    let (p, f) = antichain_family_from_leaves(param.trailing_zeros() as usize)?;
                    plain(f, p)
                }
                Some(ShapeKind::Antichain) => {
                    return Err(usage("doubletree on an antichain needs --n a power of two, at least 2"))
                }
                None => plain(arbitrary_tree_family(&poset)?, poset),
                _ => return Err(unsupported()),
            }
        }
        Method::Pattern => {
            let tree = CompleteTree::from_poset(&poset)?;
            if let Some(path) = &args.dump_patterns {
                let text: String = enumerate_patterns(d, tree.height(), budget)?
                    .iter()
                    .map(|p| format!("{p}\n"))
                    .collect();
                write_output(Some(path), &text)?;
            }
            let (p, f) = pattern_family(d, tree.height(), budget)?;
            plain(f, p)
        }
        Method::Greedy => {
            let family = match greedy_family(&poset, d, Pool::Exact { budget }) {
                Err(Error::Infeasible { .. }) => greedy_family(
                    &poset,
                    d,
                    Pool::Sampled {
                        per_step: args.samples,
                        seed: args.seed,
                    },
                )?,
                other => other?,
            };
            plain(family, poset)
        }
        Method::Random => {
            if shape != Some(ShapeKind::Antichain) {
                return Err(unsupported());
            }
            let r = random_family(param, d, args.seed, RANDOM_RETRIES)?;
            plain(r.family, r.poset)
        }
        Method::Interleave => {
            if shape != Some(ShapeKind::Chainplus) {
                return Err(unsupported());
            }
            let (p, f) = chain_event_family(param, d)?;
            plain(f, p)
        }
    };
    Ok(g)
}

fn emit(g: &Generated, d: usize, method: Method, do_verify: bool, out: Option<&Path>, budget: usize) -> Outcome {
    let mut stats = RunStats {
        n_events: g.poset.len(),
        height: g.poset.height(),
        family_size: g.family.len(),
        method: method.name().into(),
        verified: None,
        admissible_tuples: None,
    };
    if do_verify {
        let (ok, count) = verify(&g.poset, &g.family, d, budget)?;
        stats.verified = Some(ok);
        stats.admissible_tuples = Some(count);
    }
    write_output(out, &format_family(&g.poset, &g.family, d, g.comment.as_deref()))?;
    if do_verify {
        eprintln!("{}", serde_json::to_string(&stats).expect("stats serialize"));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let budget = budget()?;
    match cli.command {
        Command::Gen(args) => {
            let g = generate(&args, budget)?;
            emit(&g, args.d, args.method, args.verify, args.out.as_deref(), budget)
        }
        Command::Prune {
            poset,
            d,
            verify,
            out,
            repair,
        } => {
            let ap = load_poset(&poset, repair)?;
            let g = Generated {
                family: pruned_family(&ap, d)?.family,
                poset: ap.poset,
                comment: None,
            };
            emit(&g, d, Method::Pruned, verify, out.as_deref(), budget)
        }
        Command::Verify {
            poset,
            family,
            d,
            repair,
        } => {
            let ap = load_poset(&poset, repair)?;
            let text = read(&family)?;
            let (_, f) = parse_family(&ap.poset, &text).map_err(|e| {
                let mut fail = Failure::from(e);
                fail.msg = format!("{}: {}", family.display(), fail.msg);
                fail
            })?;
            let (_, count) = verify(&ap.poset, &f, d, budget)?;
            println!(
                "ok: {} schedules hit all {count} admissible {d}-tuples",
                f.len()
            );
            Ok(())
        }
        Command::Bounds { shape, n, d } => {
            if shape != ShapeKind::Antichain {
                return Err(usage("bounds are available for --shape antichain only"));
            }
            let report = bounds_report(n, d)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialize"));
            Ok(())
        }
        Command::Stats { poset, repair } => {
            let ap = load_poset(&poset, repair)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&poset_stats(&ap)).expect("stats serialize")
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hitfam: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
