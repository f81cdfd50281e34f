//! Root location, unit-circle verdicts and zero counting in discs.

pub mod circle;
pub mod disc;
pub mod roots;
pub mod trig;

pub use circle::{circle_report, star_discrepancy, RootStatus, UnitCircleReport, ON_CIRCLE_TOL};
pub use disc::{count_disc_zeros, disc_transitions, winding_number, DiscCount, DiscTable};
pub use roots::{poly_roots, poly_roots_with, RootBall, RootOptions};
pub use trig::{trig_sign_changes, TrigKind, TrigReport};
