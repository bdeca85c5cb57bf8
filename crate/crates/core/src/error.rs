use thiserror::Error;

use crate::group::ElementId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid transversal: {0}")]
    InvalidTransversal(String),
    #[error("cannot parse group word {0:?}")]
    InvalidWord(String),
    #[error("the generated group does not act transitively")]
    NotTransitive,
    #[error("group enumeration exceeded {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("equations live on different spaces")]
    SpaceMismatch,
    #[error("generator matrix for {generator} is singular at point {point}")]
    SingularGeneratorMatrix { generator: String, point: usize },
    #[error("connection violates the cocycle law: {0}")]
    InconsistentConnection(String),
    #[error("element {0} is not in the base-point stabilizer")]
    ElementNotInH(ElementId),
    #[error("invalid stabilizer module: {0}")]
    InvalidHModule(String),
    #[error("no isomorphism found: {0}")]
    NoIsoFound(String),
    #[error("no separating endomorphism found after {retries} attempts")]
    SplittingInconclusive { retries: usize },
    #[error("character values are not representable in the {backend} field")]
    CharacterBackendMismatch { backend: &'static str },
    #[error("field characteristic divides the stabilizer order")]
    ModularCase,
    #[error("morphism is not a solution: {0}")]
    NotASolution(String),
    #[error("structure is not invariant: {0}")]
    NotInvariant(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// The variant name, stable across message changes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::InvalidSpace(_) => "InvalidSpace",
            Error::InvalidTransversal(_) => "InvalidTransversal",
            Error::InvalidWord(_) => "InvalidWord",
            Error::NotTransitive => "NotTransitive",
            Error::GroupTooLarge { .. } => "GroupTooLarge",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::SingularGeneratorMatrix { .. } => "SingularGeneratorMatrix",
            Error::InconsistentConnection(_) => "InconsistentConnection",
            Error::ElementNotInH(_) => "ElementNotInH",
            Error::InvalidHModule(_) => "InvalidHModule",
            Error::NoIsoFound(_) => "NoIsoFound",
            Error::SplittingInconclusive { .. } => "SplittingInconclusive",
            Error::CharacterBackendMismatch { .. } => "CharacterBackendMismatch",
            Error::ModularCase => "ModularCase",
            Error::NotASolution(_) => "NotASolution",
            Error::NotInvariant(_) => "NotInvariant",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}
