//! Non-decreasing functions compared up to `g(n) <= K f(M n)`.

mod classify;
mod function;
mod magnitude;
mod order;

pub use classify::{
    strongly_superpoly_check, superquadratic_check, QuadraticRow, StrongRow, StrongWitness,
    StronglySuperpolyReport, SuperquadraticReport,
};
pub use function::{Classification, FunctionKind, SymbolicFunction, INCOMPARABLE_BREAKPOINTS};
pub use magnitude::Magnitude;
pub use order::{
    first_admissible, normalize_affine, refute_preceq_grid, verify_preceq, AffineNormalization, CheckMode,
    GridCell, GridReport, OrderWitness, PreceqReport, Verdict, DENSE_LIMIT, EXHAUSTIVE_LIMIT,
};
