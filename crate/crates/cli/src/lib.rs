//! Command-line front end: every verification, derivation and simulation as a
//! subcommand producing a JSON report.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use threewave_core::diffpoly::FieldId;
use threewave_core::hierarchy::{AppendixCheck, AppendixReading};

use commands::{ExprOp, FlowChoice, Timer, TransformSelection};
use config::RunConfig;
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "threewave", version, about = "Verify and simulate the three-wave hierarchy")]
pub struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check symmetries, inverses, the Hamiltonian form, conservation laws and identities.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Derive the parameter constraints of a flow family.
    Derive {
        /// Flow family degree: 0 (phase rotations), 1 or 2.
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
        degree: u8,
        /// Comma-separated subset of t1, t2, t3, or `all`.
        #[arg(long, default_value = "all", value_parser = TransformSelection::parse)]
        transforms: TransformSelection,
    },
    /// Integrate a flow from smooth random data and monitor conserved integrals.
    Simulate {
        #[arg(long, value_enum)]
        flow: FlowArg,
        /// Run configuration file (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for snapshot and monitor CSV files.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build the chain solution (n1, n2) from the plus-vacuum seed.
    Chain {
        /// Number of t1 applications.
        #[arg(long)]
        n1: usize,
        /// Number of t2 applications, after the t1 steps.
        #[arg(long)]
        n2: usize,
        /// Run configuration file (seed, window, tau, floor, residual_tol).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Parse, differentiate or reduce an expression.
    Expr {
        #[command(subcommand)]
        op: ExprCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    /// Symmetry residuals of the three-wave system.
    Base {
        /// Comma-separated subset of t1, t2, t3, or `all`.
        #[arg(long, default_value = "all", value_parser = TransformSelection::parse)]
        transform: TransformSelection,
        /// Flip the coupling sign in this field's equation.
        #[arg(long, value_parser = parse_field)]
        flip_sign: Option<FieldId>,
    },
    /// t1 and t2 commute and compose to t3.
    Commute,
    /// Each transformation composed with its inverse is the identity.
    Inverse {
        /// Comma-separated subset of t1, t2, t3, or `all`.
        #[arg(long, default_value = "all", value_parser = TransformSelection::parse)]
        transform: TransformSelection,
    },
    /// The first-degree flow is generated by its Hamiltonian.
    Hamiltonian,
    /// Both conserved densities along a flow.
    Conservation {
        #[arg(long, value_enum)]
        flow: FlowArg,
        /// Flip the coupling sign in this field's equation.
        #[arg(long, value_parser = parse_field)]
        flip_sign: Option<FieldId>,
    },
    /// Printed identities, potentials and product formulas.
    Appendix {
        /// One of rig1, rig2, rig3, t3-onshell, t22, sec63, or `all`.
        #[arg(long, default_value = "all", value_parser = parse_appendix)]
        which: AppendixSelection,
        /// Check the product formula with its printed bracket.
        #[arg(long)]
        inject_typo: bool,
        /// Run configuration file; `inject_typo = true` has the same effect as the flag.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExprCommand {
    /// Parse and print an expression in normal form.
    Eval { expr: String },
    /// Total x-derivative of an expression.
    Diff { expr: String },
    /// Eliminate time derivatives (`dt(...)`, `dx(...)` allowed) along the three-wave system.
    Reduce { expr: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlowArg {
    First,
    Second,
}

impl From<FlowArg> for FlowChoice {
    fn from(f: FlowArg) -> Self {
        match f {
            FlowArg::First => FlowChoice::First,
            FlowArg::Second => FlowChoice::Second,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AppendixSelection(pub Option<AppendixCheck>);

fn parse_appendix(s: &str) -> Result<AppendixSelection, String> {
    if s == "all" {
        return Ok(AppendixSelection(None));
    }
    AppendixCheck::from_name(s)
        .map(|c| AppendixSelection(Some(c)))
        .ok_or_else(|| format!("unknown identity group `{s}`"))
}

fn parse_field(s: &str) -> Result<FieldId, String> {
    FieldId::from_name(s).ok_or_else(|| format!("unknown field `{s}`"))
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, commands::CommandError> {
    Ok(match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    })
}

/// Execute a parsed command line.
pub fn execute(cli: &Cli) -> Report {
    let mut timer = Timer::default();
    let (label, result) = match &cli.command {
        Command::Verify { target } => match target {
            VerifyTarget::Base { transform, flip_sign } => (
                "verify base",
                commands::verify_base(transform, *flip_sign, &mut timer),
            ),
            VerifyTarget::Commute => ("verify commute", commands::verify_commute(&mut timer)),
            VerifyTarget::Inverse { transform } => (
                "verify inverse",
                commands::verify_inverse(transform, &mut timer),
            ),
            VerifyTarget::Hamiltonian => (
                "verify hamiltonian",
                commands::verify_hamiltonian(&mut timer),
            ),
            VerifyTarget::Conservation { flow, flip_sign } => (
                "verify conservation",
                commands::verify_conservation((*flow).into(), *flip_sign, &mut timer),
            ),
            VerifyTarget::Appendix {
                which,
                inject_typo,
                config,
            } => (
                "verify appendix",
                load_config(config.as_ref()).and_then(|cfg| {
                    let reading = if *inject_typo || cfg.inject_typo {
                        AppendixReading::AsPrinted
                    } else {
                        AppendixReading::Corrected
                    };
                    commands::verify_appendix_cmd(which.0, reading, &mut timer)
                }),
            ),
        },
        Command::Derive { degree, transforms } => (
            "derive",
            commands::derive(*degree, transforms, &mut timer),
        ),
        Command::Simulate { flow, config, csv } => (
            "simulate",
            load_config(config.as_ref()).and_then(|cfg| {
                commands::simulate((*flow).into(), &cfg, csv.as_deref(), &mut timer)
            }),
        ),
        Command::Chain { n1, n2, config } => (
            "chain",
            load_config(config.as_ref())
                .and_then(|cfg| commands::chain(*n1, *n2, &cfg, &mut timer)),
        ),
        Command::Expr { op } => {
            let (op, text) = match op {
                ExprCommand::Eval { expr } => (ExprOp::Eval, expr),
                ExprCommand::Diff { expr } => (ExprOp::Diff, expr),
                ExprCommand::Reduce { expr } => (ExprOp::Reduce, expr),
            };
            ("expr", commands::expr(op, text))
        }
    };
    commands::finish(label, result, timer, cli.timings)
}
