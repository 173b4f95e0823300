use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    InvalidPrime(u32),
    /// `p^prec` does not fit the residue representation, or `prec` is zero.
    PrecisionTooLarge { p: u32, prec: u32 },
    ZeroDenominator,
    NotIntegral { p: u32 },
    NonUnit,
    MixedContext,
    TruncationTooSmall { needed: usize, available: usize },
    NotDistinguished,
    PrecisionExhausted,
    NotTorsion,
    NotIrreducible,
    InvalidIdeal(String),
    SingularCurve,
    BadReduction { ell: u64 },
    NonConvergence,
    CoefficientSupplyExhausted { needed: usize, available: usize },
    UnsupportedCusp { num: i64, den: u64 },
    RecognitionFailed { a: u64, m: u64 },
    IncompleteTable { level: u32, residue: u64 },
    ContextMismatch(String),
    NotAUnit { a: u64, p: u32 },
    CompatFailed { level: u32, index: usize },
    NotStabilized(String),
    WrongReductionType(String),
    SingularSystem(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPrime(p) => write!(f, "{p} is not an odd prime"),
            Error::PrecisionTooLarge { p, prec } => {
                write!(f, "precision {p}^{prec} is outside the supported range")
            }
            Error::ZeroDenominator => f.write_str("zero denominator"),
            Error::NotIntegral { p } => write!(f, "value is not {p}-integral"),
            Error::NonUnit => f.write_str("element is not a unit"),
            Error::MixedContext => f.write_str("operands live in different contexts"),
            Error::TruncationTooSmall { needed, available } => {
                write!(f, "degree {needed} exceeds truncation bound {available}")
            }
            Error::NotDistinguished => f.write_str("divisor is not a distinguished polynomial"),
            Error::PrecisionExhausted => f.write_str("p-adic precision exhausted"),
            Error::NotTorsion => f.write_str("module has positive free rank"),
            Error::NotIrreducible => f.write_str("factor is not a recognised irreducible"),
            Error::InvalidIdeal(s) => write!(f, "cannot parse ideal `{s}`"),
            Error::SingularCurve => f.write_str("curve has zero discriminant"),
            Error::BadReduction { ell } => write!(f, "curve has bad reduction at {ell}"),
            Error::NonConvergence => f.write_str("iteration did not converge"),
            Error::CoefficientSupplyExhausted { needed, available } => {
                write!(f, "needs {needed} Fourier coefficients, only {available} available")
            }
            Error::UnsupportedCusp { num, den } => write!(f, "cusp {num}/{den} is not supported"),
            Error::RecognitionFailed { a, m } => {
                write!(f, "no rational under the denominator bound matches [{a}/{m}]")
            }
            Error::IncompleteTable { level, residue } => {
                write!(f, "symbol table lacks [{residue}/p^{level}]")
            }
            Error::ContextMismatch(s) => write!(f, "context mismatch: {s}"),
            Error::NotAUnit { a, p } => write!(f, "{a} is divisible by {p}"),
            Error::CompatFailed { level, index } => {
                write!(f, "norm compatibility fails at level {level}, coefficient {index}")
            }
            Error::NotStabilized(s) => write!(f, "invariants not stabilized: {s}"),
            Error::WrongReductionType(s) => write!(f, "wrong reduction type: {s}"),
            Error::SingularSystem(s) => write!(f, "singular system: {s}"),
        }
    }
}

impl core::error::Error for Error {}
