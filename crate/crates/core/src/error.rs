//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator symbol `{0}`")]
    UnknownSymbol(String),
    #[error("letter does not belong to this presentation")]
    ForeignLetter,
    #[error("unknown catalog presentation `{name}`; available: {available}")]
    UnknownCatalog { name: String, available: String },
    #[error("zero has no word representative")]
    ZeroWord,
    #[error("operation is undefined on the zero element")]
    ZeroArgument,
    #[error("unit not expressible as a nonempty product of generators")]
    UnitNotExpressible,
    #[error("generators lie on different sides")]
    SideMismatch,
    #[error("expected a pure {expected} element")]
    MixedElement { expected: &'static str },
    #[error("word is not admissible")]
    Inadmissible,
    #[error("word of length {len} is too short for window size {n}")]
    WordTooShort { len: usize, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("cyclic word is not an admissible periodic orbit")]
    InadmissibleCycle,
    #[error("description is not canonical; build it via embed_in_y")]
    NonCanonical,
    #[error("values belong to different presentations")]
    PresentationMismatch,
    #[error("no joining word: {0}")]
    JoinFailure(String),
}
