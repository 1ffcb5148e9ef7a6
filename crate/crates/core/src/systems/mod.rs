mod diagnostics;
mod model;
mod state;

pub use diagnostics::*;
pub use model::*;
pub use state::*;
