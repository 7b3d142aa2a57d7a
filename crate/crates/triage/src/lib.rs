//! Command line and HTTP triage service over aspectmine reports.

pub mod api;
pub mod cli;
pub mod session;

pub use api::router;
pub use session::Session;
