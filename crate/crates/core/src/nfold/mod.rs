//! The scheduling problem as an N-fold integer program, with a text exporter
//! and an exact solution checker. No IP solver is included.

mod model;
mod text;

pub use model::{
    build_nfold_cmax, build_nfold_objective, Block, Bound, CheckReport, NFoldError, NFoldModel, NFoldObjective, Sense,
};
pub use text::{export_model, import_model, parse_text, to_text, FormatError};
