//! Resolving `--spec`/`--builtin` into a loaded realization, and the mapping
//! from library errors onto the three exit classes.

use std::collections::BTreeMap;
use std::fs;

use liestar_core::expr::{const_eval, parse_expr, ExprError, ParseContext};
use liestar_core::kcalc::KcalcError;
use liestar_core::numeric::NumericError;
use liestar_core::realization::RealizationError;
use liestar_core::{GaussRational, Realization};

use crate::{CliError, SourceArgs};

/// How the realization was named on the command line; recorded in headers.
#[derive(Clone, Copy)]
pub enum SourceKind {
    Builtin,
    SpecFile,
}

impl SourceKind {
    pub fn label(self) -> &'static str {
        match self {
            SourceKind::Builtin => "builtin",
            SourceKind::SpecFile => "spec",
        }
    }
}

/// Parse `--kappa` as an exact constant; plain rationals and small closed
/// expressions like `1/2` or `-3/4` are all accepted.
pub fn parse_kappa(text: &str) -> Result<GaussRational, CliError> {
    let ctx = ParseContext::new(0);
    let node =
        parse_expr(text, &ctx).map_err(|e| CliError::Usage(format!("--kappa {text:?}: {e}")))?;
    const_eval(&node, &BTreeMap::new())
        .map_err(|e| CliError::Usage(format!("--kappa {text:?}: {e}")))
}

/// Load the realization a subcommand was pointed at.  Builtins self-check at
/// load; file grids stay unvalidated until the `validate` subcommand, so a
/// broken file can still be inspected.
pub fn resolve(args: &SourceArgs) -> Result<(Realization, SourceKind), CliError> {
    let kappa = args.kappa.as_deref().map(parse_kappa).transpose()?;
    match (&args.spec, &args.builtin) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "--spec and --builtin are mutually exclusive".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "exactly one of --spec or --builtin is required".into(),
        )),
        (Some(path), None) => {
            if args.dim.is_some() {
                return Err(CliError::Usage(
                    "--dim applies to builtins; grid files declare their own dimension".into(),
                ));
            }
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read {}: {e}", path.display()))
            })?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "spec".into());
            let r = Realization::from_spec_text(&stem, &text, kappa)
                .map_err(realization_error)?;
            Ok((r, SourceKind::SpecFile))
        }
        (None, Some(name)) => {
            let kappa = kappa.unwrap_or_else(GaussRational::one);
            let r = Realization::builtin(name, args.dim, kappa).map_err(realization_error)?;
            Ok((r, SourceKind::Builtin))
        }
    }
}

/// Loading and checking a grid mixes three failure kinds: files that do not
/// parse or name the wrong thing are usage errors, grids whose mathematics
/// is wrong are validation failures, and everything the engine merely could
/// not finish is a computation error.
pub fn realization_error(e: RealizationError) -> CliError {
    match e {
        RealizationError::Spec(_)
        | RealizationError::UnknownBuiltin(_)
        | RealizationError::DimensionRequired { .. }
        | RealizationError::DimensionFixed { .. } => CliError::Usage(e.to_string()),
        RealizationError::Jacobi { .. }
        | RealizationError::NotIdentityAtZero { .. }
        | RealizationError::BracketMismatch { .. } => CliError::Validation(e.to_string()),
        RealizationError::Entry { .. }
        | RealizationError::OrderShortfall { .. }
        | RealizationError::Series(_) => CliError::Computation(e.to_string()),
    }
}

pub fn kcalc_error(e: KcalcError) -> CliError {
    CliError::Computation(e.to_string())
}

pub fn numeric_error(e: NumericError) -> CliError {
    match e {
        NumericError::BadDecimal(_) | NumericError::Dimension { .. } | NumericError::ZeroSteps => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Computation(other.to_string()),
    }
}

/// `--k`/`--q` style vectors: comma-separated decimals, kept exact.
pub fn parse_decimal_vector(flag: &str, text: &str) -> Result<Vec<GaussRational>, CliError> {
    text.split(',')
        .map(|part| {
            liestar_core::numeric::parse_decimal(part)
                .map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
        })
        .collect()
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::Usage(e.to_string())
    }
}
