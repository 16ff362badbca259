//! Finite-dimensional representations of the elliptic algebra U_{q,p}(sl(2)),
//! obtained from those of U_q(sl(2)) through a nonlinear change of generators,
//! together with the coproduct induced on tensor products and a residual-based
//! verification suite.

// `!(x <= tol)` is used deliberately so that NaN fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod error;
pub mod export;
pub mod hopf;
pub mod irrep;
pub mod linalg;
pub mod verify;
pub mod weightfn;

pub use arith::{AlgebraParams, Eta, HalfInt, Scalar};
pub use error::{Error, Result};
pub use hopf::{build_induced_coproduct, build_tensor, check_coproduct, InducedCoproduct, TensorRep};
pub use irrep::{build_classical, build_mapped, check_relations, Irrep};
pub use verify::{run_suite, Check, CheckReport, ParamsEcho, SuiteConfig};
pub use weightfn::{solve_psi, ChiKind, ChiSpec, PsiSeries, WeightFunction};
