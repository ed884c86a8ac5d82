use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qkwb_cli::{
    check_bounds, emit_tables, format_reports, run_suite, Format, PotentialSource, Suite, SuiteConfig,
    TableKind, TableParams,
};
use qkwb_core::dm::{dilation_readings, lee_euler, witten_integral, PsiExponentVector};
use qkwb_core::potential::{classical_k_potential, cp2_potential, kontsevich_nd, pt_potential};
use qkwb_core::qde::{render_k_element, scalar_solution, twisted_solution, verify_qde, verify_twisted_qde};
use qkwb_core::ring::ring_by_name;
use qkwb_core::{sample_k_potential, CheckReport, Scalar};

#[derive(Parser)]
#[command(name = "qkwb", version, about = "Exact verification suites for genus-0 quantum K-theory")]
struct Cli {
    /// Default seed for sampled potentials.
    #[arg(long, global = true, env = "QKWB_SEED", default_value_t = 0)]
    seed: u64,
    /// Lift the desk-scale caps on t-order and dmax.
    #[arg(long, global = true)]
    unbounded: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Frobenius rings.
    Ring {
        #[command(subcommand)]
        cmd: RingCmd,
    },
    /// Build and save potentials.
    Potential {
        #[command(subcommand)]
        cmd: PotentialCmd,
    },
    /// Run a verification suite; exit status 0 iff every check passes.
    Verify {
        #[arg(long)]
        suite: Suite,
        /// `pt:N`, `classical-k:RING:N`, `cp2:N:DMAX`, `sampled:RANK:N[:SEED]` or `file:PATH`.
        #[arg(long)]
        potential: Option<PotentialSource>,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Report wall-clock milliseconds instead of 0.
        #[arg(long)]
        timing: bool,
    },
    /// Moduli-space Euler characteristics and intersection numbers.
    Dm {
        #[command(subcommand)]
        cmd: DmCmd,
    },
    /// The q-difference equation for projective space.
    Qde {
        #[command(subcommand)]
        cmd: QdeCmd,
    },
    /// Cohomological CP^2 data.
    Cp2 {
        #[command(subcommand)]
        cmd: Cp2Cmd,
    },
}

#[derive(Subcommand)]
enum RingCmd {
    /// Print a ring description as JSON: `pt`, `kcpN` or `hcpN`.
    Show {
        #[arg(long)]
        ring: String,
    },
}

#[derive(Subcommand)]
enum PotentialCmd {
    Make {
        /// pt, classical-k, cp2 or sampled.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 4)]
        dmax: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_k(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad exponent {x:?}")))
        .collect()
}

#[derive(Subcommand)]
enum DmCmd {
    /// chi(M_{0,n}; L_1^{k_1} ... L_n^{k_n}) for `--k 1,1,0,0,0`.
    Lee {
        #[arg(long)]
        k: String,
    },
    /// Top-degree psi integral for `--k`.
    Witten {
        #[arg(long)]
        k: String,
    },
    /// Deterministic tables: lee, witten, nd or qde.
    Table {
        #[arg(long)]
        kind: TableKind,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[arg(long, default_value_t = 5)]
        dmax: usize,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// The two readings of the dilation push-forward.
    Dilation,
}

#[derive(Subcommand)]
enum QdeCmd {
    /// Print S_d (or the twisted J_d) for d <= dmax.
    Solve {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        dmax: usize,
        #[arg(long)]
        twisted: bool,
    },
    /// Verify the recursion on the computed solution.
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        dmax: usize,
        #[arg(long)]
        twisted: bool,
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand)]
enum Cp2Cmd {
    /// Kontsevich numbers N_1..N_dmax.
    Nd {
        #[arg(long, default_value_t = 5)]
        dmax: usize,
    },
}

fn emit(reports: Vec<CheckReport>, format: Format, timing: bool) -> ExitCode {
    let reports: Vec<CheckReport> = if timing {
        reports
    } else {
        reports.into_iter().map(CheckReport::without_timing).collect()
    };
    print!("{}", format_reports(&reports, format));
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Ring {
            cmd: RingCmd::Show { ring },
        } => {
            let r = ring_by_name(&ring)?;
            println!("{}", serde_json::to_string_pretty(&r.describe())?);
        }
        Cmd::Potential {
            cmd:
                PotentialCmd::Make {
                    kind,
                    ring,
                    order,
                    dmax,
                    rank,
                    out,
                },
        } => {
            let d = (kind == "cp2").then_some(dmax);
            check_bounds(Some(order), d, cli.unbounded)?;
            let p = match kind.as_str() {
                "pt" => pt_potential(order)?,
                "classical-k" => {
                    let name = ring.context("--ring is required for classical-k")?;
                    classical_k_potential(&ring_by_name(&name)?, order)?
                }
                "cp2" => cp2_potential(order, dmax)?,
                "sampled" => sample_k_potential(rank, order, cli.seed)?,
                other => bail!("unknown potential kind {other:?} (expected pt, classical-k, cp2 or sampled)"),
            };
            let json = p.to_json();
            match out {
                Some(path) => std::fs::write(&path, json + "\n")
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => println!("{json}"),
            }
        }
        Cmd::Verify {
            suite,
            potential,
            format,
            timing,
        } => {
            let cfg = SuiteConfig {
                suite,
                potential,
                seed: cli.seed,
                format,
                unbounded: cli.unbounded,
                timing,
            };
            let (_, reports) = run_suite(&cfg)?;
            return Ok(emit(reports, cfg.format, timing));
        }
        Cmd::Dm { cmd } => match cmd {
            DmCmd::Lee { k } => {
                let v = PsiExponentVector::new(&parse_k(&k)?)?;
                println!("{}", lee_euler(&v).to_text());
            }
            DmCmd::Witten { k } => {
                let v = PsiExponentVector::new(&parse_k(&k)?)?;
                println!("{}", witten_integral(&v).to_text());
            }
            DmCmd::Table {
                kind,
                n,
                kmax,
                dmax,
                format,
            } => {
                if kind == TableKind::Nd || kind == TableKind::Qde {
                    check_bounds(None, Some(dmax), cli.unbounded)?;
                }
                print!("{}", emit_tables(kind, &TableParams { n, kmax, dmax }, format)?);
            }
            DmCmd::Dilation => {
                let (direct, rank) = dilation_readings();
                println!("direct={} rank={}", direct.to_text(), rank.to_text());
            }
        },
        Cmd::Qde { cmd } => match cmd {
            QdeCmd::Solve { n, dmax, twisted } => {
                check_bounds(None, Some(dmax), cli.unbounded)?;
                if twisted {
                    let j = twisted_solution(n, dmax);
                    for d in 0..=dmax {
                        println!("J_{d} = {}", render_k_element(j.coeff(d)));
                    }
                } else {
                    let s = scalar_solution(n, dmax);
                    for d in 0..=dmax {
                        println!("S_{d} = {}", s.coeff(d)[0]);
                    }
                }
            }
            QdeCmd::Verify {
                n,
                dmax,
                twisted,
                timing,
            } => {
                check_bounds(None, Some(dmax), cli.unbounded)?;
                let rep = if twisted {
                    verify_twisted_qde(n, &twisted_solution(n, dmax))?
                } else {
                    verify_qde(n, &scalar_solution(n, dmax))?
                };
                return Ok(emit(vec![rep], Format::Json, timing));
            }
        },
        Cmd::Cp2 {
            cmd: Cp2Cmd::Nd { dmax },
        } => {
            check_bounds(None, Some(dmax), cli.unbounded)?;
            for (i, v) in kontsevich_nd(dmax)?.iter().enumerate() {
                println!("N_{} = {}", i + 1, v.to_text());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
