//! Candidate transformative discoveries from co-citation networks.
//!
//! The crate turns field-tagged bibliographic exports into time-sliced
//! document co-citation networks and scores every cited reference by
//! betweenness centrality, citation burstness and citation count. The sigma
//! indices are geometric means of the normalized scores; `sigma2` combines
//! burstness and centrality, `sigma3` adds citations.
//!
//! A small simulator contrasts network growth by preferential attachment with
//! growth by brokerage across disconnected communities.
//!
//! ```
//! use cocite::metrics::{sigma, Rho, SigmaConfig};
//!
//! let rho = Rho { citation: 0.3, burst: 0.851, centrality: 0.537 };
//! let s2 = sigma(&rho, &SigmaConfig::sigma2());
//! assert!((s2 - 0.676).abs() < 1e-3);
//! ```

pub mod config;
pub mod error;
pub mod export;
pub mod growth;
pub mod ingest;
pub mod metrics;
pub mod network;
pub mod pipeline;

pub use error::{Error, Result};
pub use ingest::{BibRecord, CitedRefKey, Corpus, DocType};
pub use metrics::NodeMetrics;
pub use network::{CoCitationNetwork, SelectionThreshold, TimeSlice};
