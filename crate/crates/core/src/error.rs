use thiserror::Error;

use crate::che::CheError;
use crate::expansions::ExpansionError;
use crate::kummer::KummerError;
use crate::termination::TerminationError;
use crate::twostate::TwoStateError;

/// Any error raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error(transparent)]
    Che(#[from] CheError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Termination(#[from] TerminationError),
    #[error(transparent)]
    TwoState(#[from] TwoStateError),
}

impl Error {
    /// Short stable name of the error variant, used in structured output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Kummer(e) => match e {
                KummerError::NonConvergence { .. } => "NonConvergence",
                KummerError::PoleAtLowerParameter { .. } => "PoleAtLowerParameter",
                KummerError::InvalidControl { .. } => "InvalidControl",
            },
            Error::Che(e) => che_code(e),
            Error::Expansion(e) => expansion_code(e),
            Error::Termination(e) => match e {
                TerminationError::ConditionNotMet(_) => "ConditionNotMet",
                TerminationError::KindNotAdmissible { .. } => "KindNotAdmissible",
                TerminationError::DegeneratePolynomial => "DegeneratePolynomial",
                TerminationError::IllConditionedRoots { .. } => "IllConditionedRoots",
                TerminationError::EigenFailure => "EigenFailure",
                TerminationError::Expansion(e) => expansion_code(e),
            },
            Error::TwoState(e) => match e {
                TwoStateError::ConditionNotMet { .. } => "ConditionNotMet",
                TwoStateError::StepTooCoarse { .. } => "StepTooCoarse",
                TwoStateError::InvalidSteps { .. } => "InvalidSteps",
                TwoStateError::ZeroCoupling { .. } => "ZeroCoupling",
                TwoStateError::EmptyScan => "EmptyScan",
                TwoStateError::Expansion(e) => expansion_code(e),
                TwoStateError::Termination(e) => Error::Termination(e.clone()).code(),
                TwoStateError::Che(e) => che_code(e),
            },
        }
    }
}

fn che_code(e: &CheError) -> &'static str {
    match e {
        CheError::SingularPoint { .. } => "SingularPoint",
        CheError::PoleAtGamma { .. } => "PoleAtGamma",
        CheError::TruncationWarning { .. } => "TruncationWarning",
        CheError::EmptySeries => "EmptySeries",
    }
}

fn expansion_code(e: &ExpansionError) -> &'static str {
    match e {
        ExpansionError::Inapplicable { .. } => "Inapplicable",
        ExpansionError::InvalidAlpha0 { .. } => "InvalidAlpha0",
        ExpansionError::MissingS0 => "MissingS0",
        ExpansionError::FixedS0 { .. } => "FixedS0",
        ExpansionError::DivisionByZero { .. } => "DivisionByZero",
        ExpansionError::LeadingCoefficientVanishes { .. } => "LeadingCoefficientVanishes",
        ExpansionError::ClosedFormMismatch { .. } => "ClosedFormMismatch",
        ExpansionError::TailTooLarge { .. } => "TailTooLarge",
        ExpansionError::Kummer(e) => Error::Kummer(e.clone()).code(),
        ExpansionError::Che(e) => che_code(e),
    }
}
