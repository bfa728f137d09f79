//! Symbolic and Monte Carlo tools for superposition coding with binning
//! over finite alphabets.

pub mod codingsim;
pub mod error;
mod fme;
pub mod format;
pub mod infoexpr;
mod maxflow;
pub mod prob;
pub mod region;
pub mod schemes;
mod typeclass;
pub mod typicality;
pub mod varset;

pub use error::{Error, Result};
pub use infoexpr::{Atom, CIIdentity, InfoExpr};
pub use region::{region_equal, NumericPolytope, RateInequality, RateRegion, RateSymbol, Sense, SymbolKind};
pub use prob::{CondIndep, ConditionalKernel, DistLabel, JointPmf, VariableId};
pub use varset::VarSet;
