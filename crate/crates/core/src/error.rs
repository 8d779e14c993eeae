use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unbalanced parenthesis at position {pos}")]
    Unbalanced { pos: usize },

    #[error("a frame needs at least one world")]
    EmptyFrame,

    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),

    #[error("duplicate identifier `{0}`")]
    Duplicate(String),

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("relation endpoint `{0}` is not a declared world")]
    DanglingEndpoint(String),

    #[error("heredity violated: {from} <= {to}, `{atom}` holds at {from} but not at {to}")]
    Heredity {
        from: String,
        to: String,
        atom: String,
    },

    #[error("unknown submodel `{0}`")]
    UnknownSubmodel(String),

    #[error("a general model needs at least one submodel")]
    NoSubmodels,

    #[error("model does not satisfy F1 and F2 with unique witnesses")]
    NotBirelational,

    #[error("MK clauses require a strong model (F1, F2, F3 with unique witnesses)")]
    NotStrong,

    #[error("no submodel can serve as reference model: the family is not partially homogeneous")]
    NotPartial,

    #[error("submodel frames differ: `{0}` and `{1}` are not on the same frame")]
    NotHomogeneous(String, String),

    #[error("modal operator used where no accessibility relation is available")]
    NoModalRelation,

    #[error("family members do not share one carrier: `{0}` differs from `{1}`")]
    CarrierMismatch(String, String),

    #[error("bad path: {0}")]
    BadPath(String),

    #[error("no level of the model interprets `{0}`")]
    PolicyGap(String),

    #[error("invalid higher-order model: {0}")]
    InvalidModel(String),

    #[error("line {line}: {msg}")]
    ModelFile { line: usize, msg: String },

    #[error("not supported: {0}")]
    Unsupported(String),

    #[error("invalid bounds: {0}")]
    Bounds(String),
}
