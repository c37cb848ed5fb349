pub mod error;
pub mod experiment;
pub mod linalg;
pub mod propagate;
pub mod random;
pub mod record;
pub mod special;
pub mod spin_chain;
pub mod channel;
pub mod lindblad;
pub mod otoc;
pub mod stats;

pub use error::{OtocError, Result};
pub use linalg::{BipartiteSpace, CMatrix, CVector, DoubledOperator, Replica, C64};
