//! Certified numerics for non-principal Dirichlet L-functions on the line
//! `s = 1 + it`, together with the explicit upper bounds they satisfy there.
//!
//! The crate evaluates `|L(1+it, chi)|` by two independent routes (a
//! Hurwitz-zeta decomposition driven by Euler-Maclaurin summation, and Abel
//! partial summation), every analytic value carrying a rigorous error radius.
//! On top of that sit the closed-form bounds (`(phi(q)/q) log t + log q + gamma`
//! and friends) and a certifier for the scalar residual inequalities that make
//! those bounds work.

pub mod ball;
pub mod bounds;
pub mod certify;
pub mod characters;
pub mod harness;
pub mod hurwitz;
pub mod lfun;

pub use ball::ErrorBoundedComplex;
pub use characters::{DirichletCharacter, RootOfUnity, UnitGroupStructure};
pub use hurwitz::{hurwitz_zeta_em, EmConfig};
pub use lfun::{cross_check, l_eval_hurwitz, l_eval_partial_sum, LPoint, Method, Verdict};

use thiserror::Error;

/// The Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An operation that is only defined for non-principal characters was
    /// handed the principal one.
    #[error("operation requires a non-principal character (mod {0})")]
    PrincipalCharacter(u64),
    /// An argument fell outside the region where the formula is valid.
    #[error("domain violation: {0}")]
    Domain(String),
    /// The truncation search hit its ceiling before meeting the requested
    /// radius; raise the radius or switch to a higher-precision backend.
    #[error("target radius {target:e} unreachable (best bound {best:e} at N = {ceiling})")]
    TargetUnreachable {
        target: f64,
        best: f64,
        ceiling: u64,
    },
    /// Two LPoints that should describe the same (q, chi, t) do not.
    #[error("mismatched points: {0}")]
    MismatchedPoints(String),
    #[error("{0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
