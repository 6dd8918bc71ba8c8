//! Evidence-traceable temporal knowledge graphs for rare-disease synthesis.
//!
//! The crate is organised around the offline construction pipeline
//! (screen -> extract -> normalize -> correct -> anchor -> consensus -> graph)
//! and the online evaluation stack (synthesis arms, citation audit, metrics,
//! judge panel, statistics).

pub mod citeverify;
pub mod consensus;
pub mod counterfactual;
pub mod error;
pub mod evalmetrics;
pub mod extraction;
pub mod files;
pub mod graphstore;
pub mod judgepanel;
pub mod normalize;
pub mod pairconfig;
pub mod pipeline;
pub mod providers;
pub mod statkit;
pub mod synthesis;
pub mod temporal;

pub use error::{Error, Result};
