//! Conversion of RDF-star datasets into labeled property graphs.
//!
//! The pipeline is parse ([`turtle`]) → transform ([`transform`]) → export
//! ([`export`]). [`conformance`] runs the built-in test corpus through every
//! approach and compares the results against expected graph shapes.

pub mod rdf;
pub mod turtle;
pub mod isomorphism;
pub mod pg;
pub mod transform;
pub mod export;
pub mod conformance;
pub mod cli;
