use clap::{Args, ValueEnum};
use serde::Serialize;
use wtfb::checks::{identities_suite, ordering_suite, reduction_check, CheckOutcome, Fault};
use wtfb::BoundsConfig;

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::OptimizerFlags;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Closed-form expressions and information identities against brute force.
    Identities,
    /// `cs <= rs <= rstar <= cfout` on random channels and the binary grid.
    Ordering,
    /// Constant `V` collapses `rstar` to `rs`.
    Reduction,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectedFault {
    ExpressionB,
}

#[derive(Args, Serialize, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value = "identities")]
    pub suite: Suite,
    /// Random draws per identity.
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    /// Random channels for the ordering and reduction suites.
    #[arg(long, default_value_t = 20)]
    pub channels: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Perturbs a formula to confirm the harness notices.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<InjectedFault>,
    #[command(flatten)]
    pub optimizer: OptimizerFlags,
}

pub fn run(args: &CheckArgs) -> Result<(), CliError> {
    if args.cases == 0 || args.channels == 0 {
        return Err(CliError::Invalid("--cases and --channels must be positive".into()));
    }
    let fault = match args.inject_fault {
        Some(InjectedFault::ExpressionB) => Fault::ExpressionB,
        None => Fault::None,
    };
    let cfg = BoundsConfig { optimizer: args.optimizer.config(args.seed)?, ..BoundsConfig::default() };
    let (ids, ord, red) = match args.suite {
        Suite::Identities => (true, false, false),
        Suite::Ordering => (false, true, false),
        Suite::Reduction => (false, false, true),
        Suite::All => (true, true, true),
    };
    let mut outcomes: Vec<CheckOutcome> = Vec::new();
    if ids {
        outcomes.extend(identities_suite(args.seed, args.cases, fault)?);
    }
    if ord {
        outcomes.extend(ordering_suite(args.seed, args.channels, &cfg)?);
    }
    if red {
        outcomes.push(reduction_check(args.seed, args.channels, &cfg)?);
    }
    print!("{}", RunManifest::new("check", args, args.seed).comment_line());
    for o in &outcomes {
        println!("{}", o.line());
    }
    match outcomes.iter().filter(|o| !o.passed).count() {
        0 => Ok(()),
        failed => Err(CliError::ChecksFailed { failed }),
    }
}
