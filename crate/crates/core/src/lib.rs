//! Polarization analysis over tweet-like records.
//!
//! The crate is organised as a chain of stages that mirror the analysis
//! workflow:
//!
//! * [`ingest`] parses raw records, splits them into hashtag camps, extracts
//!   actor interactions and removes bot-like noise.
//! * [`textprep`] turns tweet text into clean Indonesian token lists.
//! * [`topics`] fits an LDA model with collapsed Gibbs sampling.
//! * [`graph`] builds the merged undirected actor graph and computes its
//!   network properties (degree, diameter, density, Louvain modularity).
//! * [`dynamics`] recomputes those properties per day.
//! * [`textnet`] builds the term co-occurrence network.
//! * [`report`] orchestrates everything and writes deterministic artifacts.
//!
//! Every stochastic step takes an explicit seed; identical inputs and
//! configuration produce byte-identical outputs.

pub mod dynamics;
pub mod graph;
pub mod ingest;
pub mod report;
pub mod synthetic;
pub mod textnet;
pub mod textprep;
pub mod topics;

/// Version of the report layout and the interchange file formats.
pub const FORMAT_VERSION: u32 = 1;
