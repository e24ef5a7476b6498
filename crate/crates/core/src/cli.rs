//! Command-line front end. Reports go to stdout as JSON, diagnostics to
//! stderr. Exit codes: 0 all checks pass, 1 a check fails, 2 input or
//! budget error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::algebra::{enumerate_subgroups, EnumBudget, FieldSpec, FpSpace};
use crate::cipher::{CipherDocument, SBox};
use crate::corpus::random_cipher;
use crate::group_engine::Permutation;
use crate::mixing_analysis::is_proper_mixing_layer;
use crate::report::{analyze_sbox, group_report, verify_cipher, Budgets, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "tbgroup", version, about = "Primitivity and group checks for translation-based block ciphers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Difference-image criteria of one S-box.
    AnalyzeSbox {
        /// Whitespace-separated table of p^{m_p} integers.
        table: PathBuf,
        /// `p^f/c0,...,cf` or a prime.
        #[arg(long)]
        field: String,
        #[arg(long)]
        delta: Option<u64>,
        /// Searched over 1 <= r < m_p/2 when absent.
        #[arg(long)]
        r: Option<usize>,
        /// Largest number of subgroups an anti-invariance scan may visit.
        #[arg(long)]
        subgroup_budget: Option<u64>,
    },
    /// Full analysis of a cipher spec.
    VerifyCipher {
        spec: PathBuf,
        #[arg(long)]
        r: Option<usize>,
        /// Skip the Schreier–Sims computations.
        #[arg(long)]
        skip_group: bool,
        /// Largest permutation degree for group computations.
        #[arg(long)]
        budget: Option<usize>,
        /// Largest p^e for the subgroup scan of V.
        #[arg(long)]
        subgroup_budget: Option<usize>,
    },
    /// Order, transitivity, primitivity and class of a permutation group.
    Group {
        /// One permutation per line, as its image list.
        generators: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// List the subgroups of F_p^e in canonical order.
    EnumerateSubgroups {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        min_dim: Option<usize>,
        #[arg(long)]
        max_dim: Option<usize>,
        #[arg(long)]
        count_only: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_subgroups: u64,
    },
    /// Whether each flagged round of a cipher spec has a proper mixing layer.
    CheckLayer { spec: PathBuf },
    /// Emit a seeded random cipher spec.
    RandomCipher {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match execute(cli.command, err) {
        Ok((json, code)) => {
            let _ = writeln!(out, "{json}");
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_integers(text: &str, what: &str) -> anyhow::Result<Vec<u64>> {
    text.split_whitespace()
        .map(|t| t.parse::<u64>().with_context(|| format!("{what}: `{t}` is not a non-negative integer")))
        .collect()
}

/// Brick dimension `m_p` with `p^{m_p} = len`, required to be a multiple of `f`.
fn infer_brick_dim(len: usize, field: &FieldSpec) -> anyhow::Result<usize> {
    let p = field.p() as usize;
    let (mut size, mut dim) = (1usize, 0usize);
    while size < len {
        size *= p;
        dim += 1;
    }
    if size != len || dim == 0 {
        bail!("table length {len} is not a positive power of p = {p}");
    }
    if dim % field.degree() != 0 {
        bail!("table length {len} = {p}^{dim} is not a power of q = {}", field.order());
    }
    Ok(dim)
}

fn load_cipher(path: &Path) -> anyhow::Result<CipherDocument> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing cipher spec {}", path.display()))
}

fn execute(command: Command, err: &mut dyn Write) -> anyhow::Result<(String, i32)> {
    match command {
        Command::AnalyzeSbox { table, field, delta, r, subgroup_budget } => {
            let field: FieldSpec = field.parse()?;
            let entries = parse_integers(&read(&table)?, "S-box table")?;
            let dim = infer_brick_dim(entries.len(), &field)?;
            let space = FpSpace::new(field.p(), dim)?;
            let table = entries
                .into_iter()
                .map(|x| u32::try_from(x).context("S-box entry too large"))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let sbox = SBox::new(space, table)?;
            let mut budget = EnumBudget::default();
            if let Some(b) = subgroup_budget {
                budget.max_subgroups = b as u128;
            }
            let analysis = analyze_sbox(&sbox, delta, r, &budget)?;
            for w in &analysis.warnings {
                writeln!(err, "warning: {w}")?;
            }
            Ok((to_json(&analysis)?, if analysis.passes { 0 } else { 1 }))
        }
        Command::VerifyCipher { spec, r, skip_group, budget, subgroup_budget } => {
            let doc = load_cipher(&spec)?;
            let cipher = doc.to_cipher()?;
            let mut budgets = Budgets::default();
            if let Some(b) = &doc.budget {
                budgets.max_degree = b.max_degree.unwrap_or(budgets.max_degree);
                budgets.witness.max_points = b.max_points.unwrap_or(budgets.witness.max_points);
                if let Some(s) = b.max_subgroups {
                    budgets.witness.max_subgroups = s as u128;
                }
            }
            budgets.max_degree = budget.unwrap_or(budgets.max_degree);
            budgets.witness.max_points = subgroup_budget.unwrap_or(budgets.witness.max_points);
            let id = spec.file_stem().map_or_else(|| "cipher".into(), |s| s.to_string_lossy().into_owned());
            let report = verify_cipher(&cipher, &id, VerifyOptions { r, skip_group }, &budgets)?;
            for o in &report.omissions {
                writeln!(err, "omitted: {o}")?;
            }
            Ok((to_json(&report)?, report.exit_code()))
        }
        Command::Group { generators, budget } => {
            let text = read(&generators)?;
            let gens = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .map(|(i, l)| {
                    let images = parse_integers(l, &format!("line {}", i + 1))?;
                    let images: Vec<usize> = images.into_iter().map(|x| x as usize).collect();
                    Permutation::from_images(&images).with_context(|| format!("line {}", i + 1))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            if gens.is_empty() {
                bail!("no generators in {}", generators.display());
            }
            let (report, _) = group_report(&gens, None, budget.unwrap_or(Budgets::default().max_degree))?;
            Ok((to_json(&report)?, 0))
        }
        Command::EnumerateSubgroups { p, e, min_dim, max_dim, count_only, max_subgroups } => {
            let space = FpSpace::new(p, e)?;
            let min_dim = min_dim.unwrap_or(0);
            let max_dim = max_dim.unwrap_or(e);
            let budget = EnumBudget { max_subgroups: max_subgroups as u128, ..EnumBudget::default() };
            let iter = enumerate_subgroups(space, min_dim, max_dim, &budget)?;
            #[derive(Serialize)]
            struct Listing {
                p: u32,
                e: usize,
                min_dim: usize,
                max_dim: usize,
                count: usize,
                #[serde(skip_serializing_if = "Option::is_none")]
                subgroups: Option<Vec<Vec<usize>>>,
            }
            let (count, subgroups) = if count_only {
                (iter.count(), None)
            } else {
                let all: Vec<Vec<usize>> = iter.map(|s| s.row_points()).collect();
                (all.len(), Some(all))
            };
            Ok((to_json(&Listing { p, e, min_dim, max_dim, count, subgroups })?, 0))
        }
        Command::CheckLayer { spec } => {
            let cipher = load_cipher(&spec)?.to_cipher()?;
            #[derive(Serialize)]
            struct Row {
                round: usize,
                flagged_proper: bool,
                proper_layer: bool,
                invariant_subset: Option<Vec<usize>>,
            }
            let rows = cipher
                .rounds
                .iter()
                .enumerate()
                .map(|(h, r)| {
                    let rep = is_proper_mixing_layer(&r.layer, &cipher.space)?;
                    Ok(Row {
                        round: h + 1,
                        flagged_proper: r.proper,
                        proper_layer: rep.proper,
                        invariant_subset: rep.invariant_subset,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let ok = cipher.has_proper_round();
            Ok((to_json(&rows)?, if ok { 0 } else { 1 }))
        }
        Command::RandomCipher { seed, field, m, n, rounds } => {
            let cipher = random_cipher(seed, field.parse()?, m, n, rounds)?;
            Ok((to_json(&CipherDocument::from_cipher(&cipher))?, 0))
        }
    }
}
