//! The `cayley` command line. Every subcommand reads files or standard
//! input and writes one of the text formats of the core crate, so they
//! compose through pipes:
//!
//! ```text
//! cayley poset example --kind 3 | cayley poset verify
//! cayley family dove --n 6 | cayley family check
//! ```
//!
//! Exit status: 0 on success, 1 when a verification finds a witness, 2 on
//! usage or input errors.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use cayley_diamond::family::{dove_family, middle_levels_family, TieBreak};
use cayley_diamond::markov::{
    equidistribution_report, expected_ratio_table, expected_ratio_tsv, render, sample_weighting,
    SAMPLER_NAME,
};
use cayley_diamond::sweep::{default_sweep, verify_example_sweep};
use cayley_diamond::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_WITNESS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cayley",
    version,
    about = "Strongly diamond-free Cayley posets and the families they induce"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Print decimals instead of exact `p/q` rationals.
    #[arg(long, global = true)]
    float: bool,
    /// Digits after the point with `--float`.
    #[arg(long, global = true, default_value_t = 12)]
    precision: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Tsv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group structure, generating set, period.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Read, build and check Cayley posets.
    Poset {
        #[command(subcommand)]
        cmd: PosetCmd,
    },
    /// Subset families on [n].
    Family {
        #[command(subcommand)]
        cmd: FamilyCmd,
    },
    /// Random walks on the group and expected family sizes.
    Dist {
        #[command(subcommand)]
        cmd: DistCmd,
    },
    /// Largest strongly diamond-free poset in a level window.
    Search {
        #[command(subcommand)]
        cmd: SearchCmd,
    },
    /// Batches over the example catalogue.
    Sweep {
        #[command(subcommand)]
        cmd: SweepCmd,
    },
}

#[derive(Debug, Args)]
struct GensArgs {
    /// Group literal, e.g. `7` or `2x4`.
    #[arg(long)]
    group: String,
    /// Generator literals.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
    gens: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum GroupCmd {
    Info {
        #[command(flatten)]
        gens: GensArgs,
        /// Also list the k-fold sumset.
        #[arg(long)]
        sumset: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum PosetCmd {
    /// Check for diamonds and strong chains; exit 1 with a witness.
    Verify {
        /// Poset file, `-` or absent for standard input.
        input: Option<PathBuf>,
        /// Also print the chain occupancy for every generator.
        #[arg(long)]
        chains: bool,
    },
    /// Emit a catalogue construction.
    Example {
        #[arg(long)]
        kind: u32,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        /// Generators for kind 1, as residues mod m.
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        gens: Option<Vec<i64>>,
        /// Lower level for kind 1.
        #[arg(long, allow_negative_numbers = true)]
        base: Option<i64>,
    },
    /// `(γ, i) ↦ (γ + c, i + s)`, optionally negating the generators.
    Transform {
        input: Option<PathBuf>,
        #[arg(long)]
        translate: Option<String>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        shift: i64,
        #[arg(long)]
        negate: bool,
    },
}

#[derive(Debug, Subcommand)]
enum FamilyCmd {
    /// Family induced by a poset and a weighting of [n].
    Build {
        /// Poset file.
        input: Option<PathBuf>,
        #[arg(long)]
        n: u32,
        /// Weights of 1..n as comma-separated element literals.
        #[arg(long, conflicts_with = "dove")]
        weights: Option<String>,
        /// Weights w(1) = w(2) = 2, others 0, over Z_3.
        #[arg(long)]
        dove: bool,
        /// Step probabilities for a random weighting (default uniform).
        #[arg(long, value_delimiter = ',')]
        probs: Option<Vec<String>>,
        #[arg(long)]
        hex: bool,
    },
    /// Diamond check; exit 1 with a witness.
    Check {
        input: Option<PathBuf>,
        #[arg(long)]
        hex: bool,
    },
    /// Σ 1/C(n, |A|) over the family.
    Lubell {
        input: Option<PathBuf>,
        #[arg(long)]
        hex: bool,
    },
    /// Dove's family on [n].
    Dove {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        hex: bool,
    },
    /// The k largest consecutive levels of the subset lattice.
    Middle {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Take the upper window when two are equally large.
        #[arg(long)]
        upper: bool,
        #[arg(long)]
        hex: bool,
    },
}

#[derive(Debug, Subcommand)]
enum DistCmd {
    /// Convolution powers p_k and their distance to uniform.
    Converge {
        #[command(flatten)]
        gens: GensArgs,
        #[arg(long, value_delimiter = ',')]
        probs: Option<Vec<String>>,
        #[arg(long)]
        k_max: u64,
        /// Report the first k from which max |p_k - 1/m| < epsilon.
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// E|F| / C(n, n/2) for a poset, exact.
    Expected {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        probs: Option<Vec<String>>,
    },
}

#[derive(Debug, Subcommand)]
enum SearchCmd {
    /// Branch and bound over a problem file.
    Max {
        input: Option<PathBuf>,
        /// Only branch on top-level elements at the identity.
        #[arg(long)]
        symmetry: bool,
        /// Seed the search with a known poset file.
        #[arg(long)]
        incumbent: Option<PathBuf>,
        #[arg(long)]
        max_nodes: Option<u64>,
        #[arg(long)]
        max_secs: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum SweepCmd {
    /// Verify every construction of the default catalogue.
    Examples,
}

/// Failure of a command before it could produce its normal output.
#[derive(Debug)]
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Usage>;

struct Io<'a> {
    stdin: &'a mut (dyn Read + Send),
    out: &'a mut (dyn Write + Send),
}

impl Io<'_> {
    fn read(&mut self, path: &Option<PathBuf>) -> std::result::Result<String, Usage> {
        match path {
            Some(p) if p.as_os_str() != "-" => {
                fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))
            }
            _ => {
                let mut s = String::new();
                self.stdin
                    .read_to_string(&mut s)
                    .map_err(|e| Usage(format!("standard input: {e}")))?;
                Ok(s)
            }
        }
    }

    fn print(&mut self, s: &str) -> std::result::Result<(), Usage> {
        self.out
            .write_all(s.as_bytes())
            .map_err(|e| Usage(format!("write failed: {e}")))
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(
    args: I,
    stdin: &mut (dyn Read + Send),
    stdout: &mut (dyn Write + Send),
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { stdin, out: stdout };
    let result = match cli.global.threads {
        Some(0) => Err(Usage("--threads must be at least 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut io)),
            Err(e) => Err(Usage(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Group {
            cmd: GroupCmd::Info { gens, sumset },
        } => group_info(g, io, gens, *sumset),
        Command::Poset { cmd } => match cmd {
            PosetCmd::Verify { input, chains } => poset_verify(g, io, input, *chains),
            PosetCmd::Example {
                kind,
                m,
                a,
                b,
                k,
                gens,
                base,
            } => {
                let params = KindParams {
                    m: *m,
                    a: *a,
                    b: *b,
                    k: *k,
                    gens: gens.clone(),
                    base: *base,
                };
                let p = Construction::from_kind(*kind, &params)?.build()?;
                io.print(&format::emit_poset(&p))?;
                Ok(EXIT_OK)
            }
            PosetCmd::Transform {
                input,
                translate,
                shift,
                negate,
            } => {
                let p = format::parse_poset(&io.read(input)?)?;
                let c = match translate {
                    Some(lit) => format::parse_element(p.group(), lit)?,
                    None => p.group().identity(),
                };
                io.print(&format::emit_poset(&p.transform(&c, *shift, *negate)?))?;
                Ok(EXIT_OK)
            }
        },
        Command::Family { cmd } => family(g, io, cmd),
        Command::Dist { cmd } => dist(g, io, cmd),
        Command::Search {
            cmd:
                SearchCmd::Max {
                    input,
                    symmetry,
                    incumbent,
                    max_nodes,
                    max_secs,
                },
        } => {
            let mut problem = format::parse_search_problem(&io.read(input)?)?;
            problem.symmetry_reduction = *symmetry;
            if let Some(t) = g.threads {
                problem.threads = t;
            }
            if let Some(n) = max_nodes {
                problem.budget.max_nodes = Some(*n);
            }
            if let Some(s) = max_secs {
                problem.budget.max_time = Some(Duration::from_secs(*s));
            }
            if let Some(path) = incumbent {
                problem.incumbent = Some(format::parse_poset(&io.read(&Some(path.clone()))?)?);
            }
            let r = max_sdf_poset(&problem)?;
            io.print(&format::emit_poset(&r.best))?;
            io.print(&format!("{}\n", r.summary_line()))?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            cmd: SweepCmd::Examples,
        } => sweep(g, io),
    }
}

fn precision(g: &Global) -> Option<usize> {
    g.float.then_some(g.precision)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn key_values(g: &Global, pairs: &[(&str, String)]) -> String {
    let sep = match g.format {
        OutputFormat::Text => ": ",
        OutputFormat::Tsv => "\t",
    };
    pairs
        .iter()
        .map(|(k, v)| format!("{k}{sep}{v}\n"))
        .collect()
}

fn generator_set(args: &GensArgs) -> std::result::Result<GeneratorSet, Usage> {
    let group = format::parse_group(&args.group)?;
    let lits: Vec<&str> = args.gens.iter().map(String::as_str).collect();
    Ok(GeneratorSet::new(
        &group,
        format::parse_elements(&group, &lits)?,
    )?)
}

fn group_info(g: &Global, io: &mut Io, args: &GensArgs, sumset: Option<u64>) -> Outcome {
    let gens = generator_set(args)?;
    let group = gens.group();
    let lits: Vec<String> = gens.elements().iter().map(|e| e.to_string()).collect();
    let mut pairs = vec![
        ("group", group.to_string()),
        ("order", group.order().to_string()),
        ("gens", lits.join(" ")),
        ("generating", yes_no(gens.is_generating()).to_string()),
    ];
    if let Ok(p) = gens.period() {
        pairs.push(("period", p.period_d.to_string()));
        pairs.push(("aperiodic", yes_no(p.aperiodic).to_string()));
        pairs.push((
            "difference-subgroup",
            p.difference_subgroup_size.to_string(),
        ));
    }
    if let Some(k) = sumset {
        let s: Vec<String> = gens
            .iterated_sumset(k)
            .iter()
            .map(|e| e.to_string())
            .collect();
        pairs.push(("sumset", format!("{k} {}", s.join(" "))));
    }
    io.print(&key_values(g, &pairs))?;
    Ok(EXIT_OK)
}

fn poset_verify(g: &Global, io: &mut Io, input: &Option<PathBuf>, chains: bool) -> Outcome {
    let p = format::parse_poset(&io.read(input)?)?;
    let v = p.verify();
    let ok = v.is_strongly_diamond_free();
    let mut out = match g.format {
        OutputFormat::Text => format!(
            "strongly-diamond-free: {}, vertices: {}\n",
            yes_no(ok),
            p.len()
        ),
        OutputFormat::Tsv => format!(
            "strongly-diamond-free\tvertices\n{}\t{}\n",
            yes_no(ok),
            p.len()
        ),
    };
    if let Some(d) = &v.diamond {
        out.push_str(&format!(
            "diamond: {} < {}, {} < {}\n",
            d.bottom, d.left, d.right, d.top
        ));
    }
    if let Some(c) = &v.strong_chain {
        out.push_str(&format!(
            "strong-chain: {} < {} < {} via {}\n",
            c.lower, c.middle, c.upper, c.shared_eta
        ));
    }
    if chains {
        for eta in p.gens().elements() {
            let hist = p.chain_partition_histogram(eta)?;
            let cells: Vec<String> = hist.iter().map(|(k, c)| format!("{k}={c}")).collect();
            out.push_str(&format!("chains {eta}: {}\n", cells.join(" ")));
        }
    }
    io.print(&out)?;
    Ok(if ok { EXIT_OK } else { EXIT_WITNESS })
}

/// `p/q`, an integer, or a decimal with optional exponent, read exactly.
fn parse_rational(s: &str) -> std::result::Result<BigRational, Usage> {
    let bad = || Usage(format!("bad number `{s}`"));
    if s.contains('/') {
        return BigRational::from_str(s).map_err(|_| bad());
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = BigInt::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = if scale >= 0 {
        pow(&ten, scale as u32)
    } else {
        BigRational::from_integer(BigInt::from(1)) / pow(&ten, (-scale) as u32)
    };
    Ok(BigRational::from_integer(digits) * factor)
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::from_integer(BigInt::from(1)), |acc, _| acc * x)
}

fn step_distribution(
    gens: &GeneratorSet,
    probs: &Option<Vec<String>>,
) -> std::result::Result<StepDistribution, Usage> {
    match probs {
        None => Ok(StepDistribution::uniform(gens)),
        Some(ps) => {
            let ps = ps
                .iter()
                .map(|p| parse_rational(p))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(StepDistribution::new(gens, ps)?)
        }
    }
}

fn family(g: &Global, io: &mut Io, cmd: &FamilyCmd) -> Outcome {
    match cmd {
        FamilyCmd::Build {
            input,
            n,
            weights,
            dove,
            probs,
            hex,
        } => {
            let p = format::parse_poset(&io.read(input)?)?;
            let mut header = String::new();
            let ground = if *dove {
                WeightedGroundSet::dove(*n)?
            } else if let Some(w) = weights {
                let lits: Vec<&str> = w.split(',').map(str::trim).collect();
                if lits.len() != *n as usize {
                    return Err(Usage(format!("{} weights given for n = {n}", lits.len())));
                }
                WeightedGroundSet::new(p.group(), format::parse_elements(p.group(), &lits)?)?
            } else {
                let step = step_distribution(p.gens(), probs)?;
                let ground = sample_weighting(*n, &step, g.seed)?;
                let w: Vec<String> = ground.weights().iter().map(|e| e.to_string()).collect();
                header = format!(
                    "# seed {} generator {SAMPLER_NAME}\n# weights {}\n",
                    g.seed,
                    w.join(",")
                );
                ground
            };
            let built = ground.build_family(&p)?;
            io.print(&header)?;
            io.print(&format::emit_family(&built.family, *hex))?;
            Ok(EXIT_OK)
        }
        FamilyCmd::Check { input, hex } => {
            let f = format::parse_family(&io.read(input)?, *hex)?;
            let w = f.diamond_witness();
            let mut out = match g.format {
                OutputFormat::Text => {
                    format!(
                        "members: {}, diamond-free: {}\n",
                        f.len(),
                        yes_no(w.is_none())
                    )
                }
                OutputFormat::Tsv => {
                    format!(
                        "members\tdiamond-free\n{}\t{}\n",
                        f.len(),
                        yes_no(w.is_none())
                    )
                }
            };
            if let Some(w) = &w {
                let show = |s: u64| {
                    let one = SubsetFamily::new(f.n(), [s]).expect("member of the family");
                    format::emit_family(&one, *hex)
                        .lines()
                        .nth(1)
                        .unwrap_or_default()
                        .to_string()
                };
                out.push_str(&format!(
                    "diamond: {} < {}, {} < {}\n",
                    show(w.bottom),
                    show(w.left),
                    show(w.right),
                    show(w.top)
                ));
            }
            io.print(&out)?;
            Ok(if w.is_none() { EXIT_OK } else { EXIT_WITNESS })
        }
        FamilyCmd::Lubell { input, hex } => {
            let f = format::parse_family(&io.read(input)?, *hex)?;
            io.print(&key_values(
                g,
                &[("lubell", render(&f.lubell(), precision(g)))],
            ))?;
            Ok(EXIT_OK)
        }
        FamilyCmd::Dove { n, hex } => {
            io.print(&format::emit_family(&dove_family(*n)?, *hex))?;
            Ok(EXIT_OK)
        }
        FamilyCmd::Middle { n, k, upper, hex } => {
            let tie = if *upper {
                TieBreak::Upper
            } else {
                TieBreak::Lower
            };
            io.print(&format::emit_family(
                &middle_levels_family(*n, *k, tie)?,
                *hex,
            ))?;
            Ok(EXIT_OK)
        }
    }
}

fn dist(g: &Global, io: &mut Io, cmd: &DistCmd) -> Outcome {
    let prec = precision(g);
    match cmd {
        DistCmd::Converge {
            gens,
            probs,
            k_max,
            epsilon,
        } => {
            let gens = generator_set(gens)?;
            let step = step_distribution(&gens, probs)?;
            let eps = epsilon.as_deref().map(parse_rational).transpose()?;
            let report = equidistribution_report(&step, *k_max, eps);
            let mut out = match g.format {
                OutputFormat::Tsv => report.to_tsv(prec),
                OutputFormat::Text => report
                    .tv
                    .iter()
                    .zip(&report.max_dev)
                    .map(|((k, tv), dev)| {
                        format!(
                            "k {k} tv {} max-dev {}\n",
                            render(tv, prec),
                            render(dev, prec)
                        )
                    })
                    .collect(),
            };
            if g.format == OutputFormat::Text && report.epsilon.is_some() {
                let k0 = report.k0.map_or("none".to_string(), |k| k.to_string());
                out.push_str(&format!("k0 {k0}\n"));
            }
            io.print(&out)?;
            Ok(EXIT_OK)
        }
        DistCmd::Expected { input, n, probs } => {
            let p = format::parse_poset(&io.read(input)?)?;
            let step = step_distribution(p.gens(), probs)?;
            let rows = expected_ratio_table(&p, n, &step)?;
            let out = match g.format {
                OutputFormat::Tsv => expected_ratio_tsv(&rows, prec),
                OutputFormat::Text => rows
                    .iter()
                    .map(|r| {
                        format!(
                            "n {} ratio {} target {} gap {}\n",
                            r.n,
                            render(&r.ratio, prec),
                            render(&r.target, prec),
                            render(&r.gap, prec)
                        )
                    })
                    .collect(),
            };
            io.print(&out)?;
            Ok(EXIT_OK)
        }
    }
}

fn sweep(g: &Global, io: &mut Io) -> Outcome {
    let rows = verify_example_sweep(&default_sweep());
    let mut out = String::new();
    if g.format == OutputFormat::Tsv {
        out.push_str("instance\tkind\torder\tvertices\texpected\tsdf\tperiod\tresult\n");
    }
    let mut failures = 0;
    for r in &rows {
        let tag = if r.passed() { "pass" } else { "fail" };
        failures += usize::from(!r.passed());
        let (vertices, expected, sdf, period) = match &r.outcome {
            Ok(o) => (
                o.vertices.to_string(),
                o.expected.to_string(),
                yes_no(o.verdict.is_strongly_diamond_free()).to_string(),
                o.period
                    .as_ref()
                    .map_or("-".to_string(), |p| p.period_d.to_string()),
            ),
            Err(e) => ("-".into(), "-".into(), "-".into(), e.to_string()),
        };
        out.push_str(&match g.format {
            OutputFormat::Tsv => format!(
                "{}\t{}\t{}\t{vertices}\t{expected}\t{sdf}\t{period}\t{tag}\n",
                r.description, r.kind, r.order
            ),
            OutputFormat::Text => format!(
                "{tag} {}: vertices {vertices}/{expected}, sdf {sdf}, period {period}\n",
                r.description
            ),
        });
    }
    if g.format == OutputFormat::Text {
        out.push_str(&format!("{} instances, {failures} failed\n", rows.len()));
    }
    io.print(&out)?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_WITNESS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse_exactly() {
        let r = |s| parse_rational(s).unwrap();
        assert_eq!(r("1/3"), BigRational::new(1.into(), 3.into()));
        assert_eq!(r("1e-9"), BigRational::new(1.into(), 1_000_000_000.into()));
        assert_eq!(r("0.25"), BigRational::new(1.into(), 4.into()));
        assert_eq!(r("2.5e1"), BigRational::from_integer(25.into()));
        assert!(parse_rational("x").is_err());
    }
}
