//! Blind and oracle separation measures.

mod coherence;
mod rank;
mod sir;

pub use coherence::{CoherenceEstimator, MscValue, Taper, WelchConfig};
pub use rank::spearman;
pub use sir::{default_assignment, sir, Assignment, SirReport};
