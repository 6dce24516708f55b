//! Finite-carrier checkers for the sequence-based termination principles,
//! and executable transcriptions of the constructions that relate them.
//!
//! Quantifiers over infinite sequences range over lassos (eventually
//! periodic sequences). On a finite carrier every descending sequence can
//! be replaced by a lasso, so for the statements checked here this loses
//! nothing; where a check is only valid on a bounded fragment its doc says
//! so.

pub mod bar;
pub mod campaign;
pub mod instance;
pub mod lemma34;
pub mod lemma44;
pub mod mbs;
pub mod principles;
pub mod stp;

pub use bar::{bar_induction_check, BarReport};
pub use campaign::{CampaignReport, GenConfig};
pub use instance::{InstanceDoc, InstanceError, PrincipleInstance};
pub use lemma44::{lemma44_check, lemma44_translate, Direction, Lemma44Report, PremiseAdapter};
pub use lemma34::{check_on_instance, diagonal, Diagonal, Lemma34, Lemma34Error, OpenPredicate};
pub use mbs::{minimal_bad_sequence, verify_minimal, wellfounded_by_walks, MbsError, MbsVerification, MinimalBad};
pub use principles::{emin_check, ewf, min_check, swf, Ewf, MinResult, Swf, TailMode};
pub use stp::{gl_check, stp_check, stp_check_with, GlReport, StpError, StpReport, StpVerdict};
