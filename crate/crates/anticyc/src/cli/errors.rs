use serde_json::Value;
use thiserror::Error;

use crate::autforms::AutformsError;
use crate::branching::BranchingError;
use crate::coeff::CoeffError;
use crate::dist::DistError;
use crate::family::FamilyError;
use crate::lfun::LfunError;
use crate::weights::WeightError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("verification failed")]
    Verification(Value),
    #[error("schema violation: {0}")]
    Schema(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Schema(_) => 4,
        }
    }

    fn qualified(module: &str, schema: bool, message: String) -> Self {
        let text = format!("{module}: {message}");
        if schema {
            CliError::Schema(text)
        } else {
            CliError::Precondition(text)
        }
    }
}

fn coeff_is_schema(e: &CoeffError) -> bool {
    matches!(e, CoeffError::Schema(_) | CoeffError::Arity { .. })
}

fn weight_is_schema(e: &WeightError) -> bool {
    match e {
        WeightError::Shape { .. } | WeightError::ZeroRank | WeightError::DirectionCount { .. } => true,
        WeightError::Coeff(c) => coeff_is_schema(c),
        _ => false,
    }
}

fn dist_is_schema(e: &DistError) -> bool {
    match e {
        DistError::Format(_) | DistError::Mismatch(_) => true,
        DistError::Coeff(c) => coeff_is_schema(c),
        DistError::Weight(w) => weight_is_schema(w),
        _ => false,
    }
}

fn autforms_is_schema(e: &AutformsError) -> bool {
    match e {
        AutformsError::Schema(_) | AutformsError::Shape | AutformsError::CosetCount { .. } | AutformsError::Inconsistent(_) => true,
        AutformsError::Dist(d) => dist_is_schema(d),
        AutformsError::Weight(w) => weight_is_schema(w),
        AutformsError::Coeff(c) => coeff_is_schema(c),
        _ => false,
    }
}

fn lfun_is_schema(e: &LfunError) -> bool {
    match e {
        LfunError::Autforms(a) => autforms_is_schema(a),
        LfunError::Dist(d) => dist_is_schema(d),
        LfunError::Coeff(c) => coeff_is_schema(c),
        _ => false,
    }
}

impl From<CoeffError> for CliError {
    fn from(e: CoeffError) -> Self {
        Self::qualified("coeff", coeff_is_schema(&e), e.to_string())
    }
}

impl From<WeightError> for CliError {
    fn from(e: WeightError) -> Self {
        Self::qualified("weights", weight_is_schema(&e), e.to_string())
    }
}

impl From<BranchingError> for CliError {
    fn from(e: BranchingError) -> Self {
        Self::qualified("branching", false, e.to_string())
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        Self::qualified("dist", dist_is_schema(&e), e.to_string())
    }
}

impl From<AutformsError> for CliError {
    fn from(e: AutformsError) -> Self {
        Self::qualified("autforms", autforms_is_schema(&e), e.to_string())
    }
}

impl From<LfunError> for CliError {
    fn from(e: LfunError) -> Self {
        Self::qualified("lfun", lfun_is_schema(&e), e.to_string())
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        let schema = match &e {
            FamilyError::Autforms(a) => autforms_is_schema(a),
            FamilyError::Lfun(l) => lfun_is_schema(l),
            FamilyError::Dist(d) => dist_is_schema(d),
            FamilyError::Coeff(c) => coeff_is_schema(c),
            _ => false,
        };
        Self::qualified("family", schema, e.to_string())
    }
}
