use std::io::Write;

use qtrl_core::{evaluate, EvalSummary};

use crate::args::EvalArgs;
use crate::error::{CliError, CliResult};
use crate::export::ExportedPolicy;

pub fn run(args: &EvalArgs, out: &mut impl Write) -> CliResult<EvalSummary> {
    if args.eval_episodes == 0 {
        return Err(CliError::Usage("--eval-episodes must be at least 1".into()));
    }
    let export = ExportedPolicy::load(&args.model)?;
    let policy = export.policy()?;
    let summary = evaluate(
        &policy,
        export.provenance.env,
        args.eval_episodes,
        args.seed,
    )?;
    let _ = writeln!(out, "env:      {}", export.provenance.env);
    let _ = writeln!(out, "episodes: {}", summary.totals.len());
    let _ = writeln!(out, "mean:     {:.3}", summary.mean);
    let _ = writeln!(out, "min:      {:.3}", summary.min);
    let _ = writeln!(out, "max:      {:.3}", summary.max);
    Ok(summary)
}
