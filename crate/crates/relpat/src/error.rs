use crate::pattern::{RelationKind, Var};

/// Errors shared across the crate. Deciders report refutations as data, not
/// errors; everything here is a malformed input, a violated precondition, or
/// an exceeded resource guard.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("alphabet must contain at least one distinct symbol")]
    EmptyAlphabet,
    #[error("duplicate alphabet symbol {0:?}")]
    DuplicateSymbol(char),
    #[error("pattern must be nonempty")]
    EmptyPattern,
    #[error("variable {0} occurs more than once in the pattern")]
    DuplicateVariable(Var),
    #[error("terminal {0:?} is not in the alphabet")]
    SymbolNotInAlphabet(char),
    #[error("variable name {0:?} is not usable (empty, non-identifier, or spells a terminal run)")]
    BadVariableName(String),
    #[error("relation pair mentions {0}, which does not occur in the pattern")]
    UnknownVariableInPairs(Var),
    #[error("relation graph has an odd cycle; not reversal-friendly")]
    NotReversalFriendly,
    #[error("no group with index {0}")]
    UnknownGroup(usize),
    #[error("operation requires relation kind {expected:?}, got {found:?}")]
    WrongKind {
        expected: RelationKind,
        found: RelationKind,
    },
    #[error("operation requires a binary alphabet")]
    NonBinaryAlphabet,
    #[error("operation requires an alphabet of at least {needed} symbols")]
    AlphabetTooSmall { needed: usize },
    #[error("substitution does not assign variable {0}")]
    MissingVariable(Var),
    #[error("substitution violates relation {kind:?} on pair ({x}, {y})")]
    RelationViolated { x: Var, y: Var, kind: RelationKind },
    #[error("content enumeration needs {required} items, above the cap {cap}")]
    GroupTooLarge { required: u128, cap: u64 },
    #[error("a generator vector is all zeros")]
    ZeroGenerator,
    #[error("vectors have mismatched dimensions")]
    DimensionMismatch,
    #[error("instance exceeds the configured guard ({0})")]
    InstanceTooLarge(String),
    #[error("candidate space {required} exceeds the oracle budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("pattern is not in P_2,3: {0}")]
    NotP23(String),
    #[error("constructed witness failed the unambiguity conditions (internal inconsistency)")]
    UnambiguityCheckFailed,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("oracle asserts non-inclusion but no separating word exists within the bound")]
    WitnessNotFoundWithinBound,
    #[error("sample contains a negatively labeled word")]
    NegativeLabelPresent,
    #[error("pattern contains terminal symbols where a terminal-free pattern is required")]
    NotTerminalFree,
    #[error("word {0:?} is not a member of the source language")]
    NotAMember(String),
    #[error("supplied decomposition does not reproduce the word")]
    InvalidDecomposition,
    #[error("construction produced an empty pattern")]
    EmptyConstruction,
    #[error("image missing for variable {0}")]
    MissingImage(Var),
    #[error("signed pattern has a base with several same-orientation occurrences and no opposite one; not expressible as a reversal relation")]
    UnrepresentableSignedPattern,
    #[error("sample already labels {0:?} with the opposite label")]
    ConflictingLabel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
