//! Spectral-sequence bookkeeping for the self-map verification: charts with
//! named classes, the differential ledger encoding the two obstruction
//! chapters, the corrected Leibniz engine, page computation, the detection
//! chart, and the obstruction sweeps.

pub mod chart_io;
pub mod engine;
pub mod eo2;
pub mod ledger;
pub mod pages;
pub mod sweep;

pub use engine::{eval_formal, mono_key, parse_mono, DerivationEngine, Formal};
pub use eo2::{hurewicz_check, HurewiczVerdict};
pub use ledger::{ClassVec, Entry, Ledger, LedgerEntry};
pub use pages::{run_pages, Fate, PageRun, ResolvedDifferential};
pub use sweep::{builtin_ledger, Certificate, SsqContext};
