//! Command-line surface. Every argument has a bounded default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divring_core::matroid::DEFAULT_CEILING;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "divring", version, about = "Exact experiments on ordered group algebras, series inversion and module-induced closures")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Read the invocation from a `key=value` file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Injective,
    Surjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatIdealCheck {
    Axioms,
    ModuleConditions,
    DetAgreement,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invert the action of x on a and print the leading terms.
    Invert(InvertArgs),
    /// Evaluate the order bijection g ↦ min(g·supp x) and its inverse.
    Rho(RhoArgs),
    /// Pair a right series with a left series.
    Pair(PairArgs),
    /// Stream the well-ordered index set used by an inversion.
    WqoDemo(WqoArgs),
    /// Audit the closure-operator axioms induced by a module.
    ClosureAudit(ClosureArgs),
    /// Search for exchange-property violations.
    ExchangeAudit(ExchangeArgs),
    /// Check the strong-matrix lemmas on random instances.
    StrongAudit(StrongArgs),
    /// Check the either/or condition and its consequences.
    EitherorAudit(EitherOrArgs),
    /// Audit a set of square matrices against the prime matrix ideal axioms.
    MatidealAudit(MatIdealArgs),
    /// Compare row-sum closure with closure under elementary operations.
    MalcolmsonAudit(MalcolmsonArgs),
    /// Local orders of x^n on a finite set, and their periodicity.
    Partition(PartitionArgs),
    /// Probe maps a ↦ a·y1·y2⁻¹ − a·x1·x2⁻¹ for zero-or-injective behaviour.
    ProbeQ2(ProbeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Invert(_) => "invert",
            Command::Rho(_) => "rho",
            Command::Pair(_) => "pair",
            Command::WqoDemo(_) => "wqo-demo",
            Command::ClosureAudit(_) => "closure-audit",
            Command::ExchangeAudit(_) => "exchange-audit",
            Command::StrongAudit(_) => "strong-audit",
            Command::EitherorAudit(_) => "eitheror-audit",
            Command::MatidealAudit(_) => "matideal-audit",
            Command::MalcolmsonAudit(_) => "malcolmson-audit",
            Command::Partition(_) => "partition",
            Command::ProbeQ2(_) => "probe-q2",
        }
    }

    /// The resolved parameters, as serializable data.
    pub fn parameters(&self) -> serde_json::Value {
        let v = match self {
            Command::Invert(a) => serde_json::to_value(a),
            Command::Rho(a) => serde_json::to_value(a),
            Command::Pair(a) => serde_json::to_value(a),
            Command::WqoDemo(a) => serde_json::to_value(a),
            Command::ClosureAudit(a) => serde_json::to_value(a),
            Command::ExchangeAudit(a) => serde_json::to_value(a),
            Command::StrongAudit(a) => serde_json::to_value(a),
            Command::EitherorAudit(a) => serde_json::to_value(a),
            Command::MatidealAudit(a) => serde_json::to_value(a),
            Command::MalcolmsonAudit(a) => serde_json::to_value(a),
            Command::Partition(a) => serde_json::to_value(a),
            Command::ProbeQ2(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct InvertArgs {
    #[arg(long, default_value = "c=-1")]
    pub group: String,
    /// Coefficient field.
    #[arg(long, default_value = "Q")]
    pub ring: String,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub a: String,
    #[arg(long, default_value_t = 20)]
    pub terms: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    /// Elements of the index set the inversion may process.
    #[arg(long, default_value_t = 5_000)]
    pub max_index: usize,
    #[arg(long, default_value_t = 200_000)]
    pub max_steps: usize,
    /// Assert support containment at every step.
    #[arg(long)]
    pub check_containment: bool,
    /// Multiply the printed prefix back by x and compare with a.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct RhoArgs {
    #[arg(long, default_value = "c=-1")]
    pub group: String,
    /// Comma-separated support of x.
    #[arg(long)]
    pub support: String,
    /// Comma-separated elements to map.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    /// Random elements to check bijectivity and monotonicity on.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 4)]
    pub bound: i64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct PairArgs {
    #[arg(long, default_value = "c=-1")]
    pub group: String,
    #[arg(long, default_value = "Q")]
    pub ring: String,
    /// Right series (a finite element, or its quotient by --a-divisor).
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub a_divisor: Option<String>,
    /// Left series (a finite element, or its quotient by --b-divisor).
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub b_divisor: Option<String>,
    /// Also check ⟨a·r, b⟩ = ⟨a, r·b⟩ for this group-ring element.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub max_pulls: usize,
    #[arg(long, default_value_t = 5_000)]
    pub max_index: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct WqoArgs {
    #[arg(long, default_value = "c=-1")]
    pub group: String,
    #[arg(long, default_value = "Q")]
    pub ring: String,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub a: String,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    #[arg(long, default_value_t = 5_000)]
    pub max_index: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ClosureArgs {
    /// Ring of entries: Z or Zmod(m).
    #[arg(long)]
    pub ring: String,
    /// Module inducing the closures; the regular module (or Q over Z) if absent.
    #[arg(long)]
    pub module: Option<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 3)]
    pub bound: i64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also audit the restricted exchange and finitary properties.
    #[arg(long)]
    pub restricted: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ExchangeArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long)]
    pub module: Option<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub bound: i64,
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    pub ceiling: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct StrongArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long)]
    pub module: Option<String>,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    /// Largest number of rows.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct EitherOrArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long)]
    pub module: Option<String>,
    /// Largest matrix height.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub bound: i64,
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    pub ceiling: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct MatIdealArgs {
    #[arg(long, default_value = "Z")]
    pub ring: String,
    /// Entry bound for integer matrices.
    #[arg(long, default_value_t = 2)]
    pub window: i64,
    /// Largest matrix size.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// `induced`, `det(p)` or `list([[..]];[[..]])`.
    #[arg(long, default_value = "induced")]
    pub spec: String,
    #[arg(long, default_value = "Zmod(4)")]
    pub module: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Injective)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = MatIdealCheck::Axioms)]
    pub check: MatIdealCheck,
    /// Largest number of matrices an enumeration may visit.
    #[arg(long, default_value_t = 1 << 20)]
    pub ceiling: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct MalcolmsonArgs {
    #[arg(long, default_value = "Z")]
    pub ring: String,
    #[arg(long, default_value_t = 2)]
    pub window: i64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value = "det(2)")]
    pub spec: String,
    #[arg(long, default_value = "Zmod(4)")]
    pub module: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Injective)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1 << 20)]
    pub ceiling: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct PartitionArgs {
    #[arg(long, default_value = "c=zeta3")]
    pub group: String,
    /// Comma-separated finite set S.
    #[arg(long, default_value = "1,y^(-1-w)")]
    pub set: String,
    /// Probe n in [-window, window].
    #[arg(long, default_value_t = 50)]
    pub window: i64,
    /// Print the local order of x^n for |n| up to this.
    #[arg(long, default_value_t = 3)]
    pub show: i64,
    /// Fail unless the least period is this (`none` for no period).
    #[arg(long)]
    pub expect_period: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ProbeArgs {
    #[arg(long, default_value = "c=-1")]
    pub group: String,
    #[arg(long, default_value = "Fp(5)")]
    pub ring: String,
    /// Random maps to probe.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Random inputs per map.
    #[arg(long, default_value_t = 4)]
    pub probes: usize,
    /// Terms of each image inspected.
    #[arg(long, default_value_t = 20)]
    pub terms: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 2_000)]
    pub max_index: usize,
}
