//! `flohaar` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.
//! Data goes to stdout (or `--output`), logs to stderr.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use flohaar::analysis::{frame_potentials, reference_value, EnsembleSampler};
use flohaar::angle_sampling::SinPowMethod;
use flohaar::circuit_model::serialize;
use flohaar::clifford_samplers::{clifford_gate_stats, sample_with, CliffordSampler};
use flohaar::commutant::commutant_table;
use flohaar::haar_layouts::{build_layout, build_active_triangular};
use flohaar::hurwitz_oracle::{compile_so, compile_u, haar_orthogonal, haar_unitary};
use flohaar::representations::{adjoint_matrix, check_adjoint_consistency, check_symmetries, int_adjoint};
use flohaar::turnover::compress_active_triangular;
use flohaar::{Ensemble, FramePotentialReport, Group, LayoutTag, Streams};

#[derive(Parser, Debug)]
#[command(name = "flohaar", version, about = "Haar-random fermionic linear optics circuits")]
struct Cli {
    /// Worker threads; changes wall time only, never output.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Adjoint,
    Compile,
    Clifford,
    Turnover,
    Symmetries,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sampler {
    Triangular,
    Passive,
    Brickwall,
}

impl From<Sampler> for CliffordSampler {
    fn from(s: Sampler) -> Self {
        match s {
            Sampler::Triangular => CliffordSampler::Triangular,
            Sampler::Passive => CliffordSampler::Passive,
            Sampler::Brickwall => CliffordSampler::Brickwall,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw circuits from an ensemble.
    Sample {
        #[arg(long)]
        ensemble: Ensemble,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        seed: u64,
        /// Use the truncated rejection sampler for sin^k slots.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte-Carlo frame potentials E|Tr U|^{2t}, t = 1..t-max.
    FramePotential {
        #[arg(long)]
        ensemble: Ensemble,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        t_max: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Add the exact reference and z-score columns.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact t-fold commutant dimension.
    Commutant {
        #[arg(long)]
        group: Group,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        /// Print the constituent table as CSV instead of the bare number.
        #[arg(long)]
        table: bool,
    },
    /// Nontrivial gate counts of the Clifford samplers.
    GateStats {
        #[arg(long, value_enum, default_value = "triangular")]
        sampler: Sampler,
        /// One or more qubit counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Slot geometry and angle law of a layout.
    Layout {
        #[arg(long)]
        tag: LayoutTag,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run an invariant suite on fresh samples.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
}

fn sink(output: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match output {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_sample(ensemble: Ensemble, n: usize, count: u64, seed: u64, eta: Option<f64>, format: Format, output: &Option<PathBuf>) -> Result<()> {
    let method = match eta {
        Some(e) if !(e > 0.0 && e < 1.0) => bail!("--eta must lie in (0, 1)"),
        Some(eta) => SinPowMethod::Rejection { eta },
        None => SinPowMethod::Exact,
    };
    let sampler = EnsembleSampler::new(ensemble, n, seed)?.with_sinpow_method(method);
    let circuits: Vec<_> = (0..count).into_par_iter().map(|i| sampler.circuit(i)).collect();
    let mut out = sink(output)?;
    match format {
        Format::Jsonl => {
            for c in &circuits {
                writeln!(out, "{}", serialize(c))?;
            }
        }
        Format::Csv => {
            writeln!(out, "sample,position,kind,site,angle")?;
            for (i, c) in circuits.iter().enumerate() {
                for (p, g) in c.gates.iter().enumerate() {
                    let site = g.site.map(|q| q.to_string()).unwrap_or_default();
                    writeln!(out, "{i},{},{},{site},{:.16e}", p + 1, g.kind, g.angle)?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_frame_potential(ensemble: Ensemble, n: usize, t_max: usize, samples: usize, seed: u64, exact: bool, output: &Option<PathBuf>) -> Result<()> {
    let start = Instant::now();
    let ts: Vec<usize> = (1..=t_max).collect();
    let reports = frame_potentials(ensemble, n, &ts, samples, seed)?;
    eprintln!("sampled {samples} circuits of {ensemble} at n = {n} in {:.1}s", start.elapsed().as_secs_f64());
    let mut out = sink(output)?;
    writeln!(out, "{}", FramePotentialReport::CSV_HEADER)?;
    for r in reports {
        let r = if exact {
            match reference_value(ensemble, n, r.t)? {
                Some(v) => r.with_exact(v),
                None => r,
            }
        } else {
            r
        };
        writeln!(out, "{}", r.csv_row())?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_commutant(group: Group, n: usize, t: usize, table: bool) -> Result<()> {
    let (dim, irreps) = commutant_table(group, n, t)?;
    let mut out = sink(&None)?;
    if table {
        writeln!(out, "highest_weight,multiplicity,dimension")?;
        for r in irreps {
            writeln!(out, "\"{}\",{},{}", r.highest, r.multiplicity, r.dimension)?;
        }
        writeln!(out, "# commutant dimension {dim}")?;
    } else {
        writeln!(out, "{dim}")?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_gate_stats(sampler: Sampler, ns: &[usize], samples: usize, seed: u64, output: &Option<PathBuf>) -> Result<()> {
    if samples < 2 {
        bail!("--samples must be at least 2");
    }
    if ns.contains(&0) {
        bail!("--n values must be at least 1");
    }
    let streams = Streams::new(seed, 0);
    let mut out = sink(output)?;
    writeln!(out, "n,mean_two_qubit,std,mean_total")?;
    for &n in ns {
        let s = clifford_gate_stats(sampler.into(), n, samples, &streams);
        writeln!(out, "{},{},{},{}", n, s.mean_two_qubit, s.std_two_qubit, s.mean_total)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_layout(tag: LayoutTag, n: usize, output: &Option<PathBuf>) -> Result<()> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let mut out = sink(output)?;
    write!(out, "{}", build_layout(tag, n).to_csv())?;
    out.flush()?;
    Ok(())
}

/// Failures among `samples` indices of a check.
fn failures(samples: u64, check: impl Fn(u64) -> bool + Sync) -> u64 {
    (0..samples).into_par_iter().filter(|&i| !check(i)).count() as u64
}

fn cmd_verify(suite: Suite, n: usize, samples: u64, seed: u64) -> Result<bool> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let dense = n <= flohaar::circuit_model::dense_cap();
    let run = |s: Suite| suite == Suite::All || suite == s;
    let mut results: Vec<(String, u64, u64)> = Vec::new();
    if run(Suite::Adjoint) {
        if !dense {
            bail!("adjoint suite needs dense simulation; n = {n} exceeds FLOHAAR_DENSE_CAP");
        }
        for e in Ensemble::ALL {
            let s = EnsembleSampler::new(e, n, seed)?;
            let bad = failures(samples, |i| check_adjoint_consistency(&s.circuit(i), 1e-9).unwrap_or(false));
            results.push((format!("adjoint {e}"), bad, samples));
        }
    }
    if run(Suite::Compile) {
        let streams = Streams::new(seed, 100);
        let bad = failures(samples, |i| {
            let o = haar_orthogonal(2 * n, &mut streams.rng(i, 0));
            compile_so(&o).is_ok_and(|t| t.in_range() && (t.rebuild() - &o).amax() < 1e-9)
        });
        results.push(("compile SO(2n)".into(), bad, samples));
        let bad = failures(samples, |i| {
            let u = haar_unitary(n, &mut streams.rng(i, 1));
            compile_u(&u).is_ok_and(|t| t.in_range() && (t.rebuild() - &u).iter().all(|z| z.norm() < 1e-9))
        });
        results.push(("compile U(n)".into(), bad, samples));
    }
    if run(Suite::Clifford) {
        let streams = Streams::new(seed, 101);
        for (name, which) in [("triangular", CliffordSampler::Triangular), ("passive", CliffordSampler::Passive), ("brickwall", CliffordSampler::Brickwall)] {
            let bad = failures(samples, |i| {
                let c = sample_with(which, n, &mut streams.rng(i, 0)).circuit;
                int_adjoint(&c).is_some_and(|m| {
                    m.signed_permutation_det() == Some(1) && (which != CliffordSampler::Passive || m.is_symplectic())
                })
            });
            results.push((format!("clifford {name}"), bad, samples));
        }
    }
    if run(Suite::Turnover) {
        let tri = build_active_triangular(n);
        let streams = Streams::new(seed, 102);
        let bad = failures(samples, |i| {
            let c = tri.sample_indexed(&streams, i);
            compress_active_triangular(&c).is_ok_and(|out| (adjoint_matrix(&c) - adjoint_matrix(&out.circuit)).amax() < 1e-9)
        });
        results.push(("turnover compression".into(), bad, samples));
    }
    if run(Suite::Symmetries) {
        if !dense {
            bail!("symmetries suite needs dense simulation; n = {n} exceeds FLOHAAR_DENSE_CAP");
        }
        for e in Ensemble::ALL {
            let s = EnsembleSampler::new(e, n, seed)?;
            let passive = e.group() == Group::Passive;
            let bad = failures(samples, |i| {
                check_symmetries(&s.circuit(i), 1e-9).is_ok_and(|r| r.parity_preserved && (!passive || r.number_preserved))
            });
            results.push((format!("symmetries {e}"), bad, samples));
        }
    }
    let mut out = sink(&None)?;
    let mut all = true;
    for (name, bad, total) in &results {
        let verdict = if *bad == 0 { "pass" } else { "FAIL" };
        all &= *bad == 0;
        writeln!(out, "{verdict}  {name}: {} of {total} ok", total - bad)?;
    }
    writeln!(out, "{}", if all { "verify: pass" } else { "verify: FAIL" })?;
    out.flush()?;
    Ok(all)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("cannot configure worker threads")?;
    }
    match cli.command {
        Command::Sample { ensemble, n, count, seed, eta, format, output } => cmd_sample(ensemble, n, count, seed, eta, format, &output)?,
        Command::FramePotential { ensemble, n, t_max, samples, seed, exact, output } => {
            cmd_frame_potential(ensemble, n, t_max, samples, seed, exact, &output)?
        }
        Command::Commutant { group, n, t, table } => cmd_commutant(group, n, t, table)?,
        Command::GateStats { sampler, n, samples, seed, output } => cmd_gate_stats(sampler, &n, samples, seed, &output)?,
        Command::Layout { tag, n, output } => cmd_layout(tag, n, &output)?,
        Command::Verify { suite, n, samples, seed } => return cmd_verify(suite, n, samples, seed),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
