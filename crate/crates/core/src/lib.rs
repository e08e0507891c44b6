//! Combinatorial and numerical machinery for cell complexes of tropical
//! moduli spaces and spaces of quadratic forms.
//!
//! The crate is organised around a handful of core objects:
//!
//! * [`graphs`] — stable weighted multigraphs, their contractions, core
//!   subgraphs, graph polynomials and symbolic Laplacians, and the
//!   enumeration of isomorphism classes at a fixed genus.
//! * [`quadforms`] — positive definite rational quadratic forms, minimal
//!   vectors, Voronoï cones, perfect-form enumeration and the assembly of
//!   the perfect-cone cell complex for small rank.
//! * [`polyhedral`] — polyhedral linear configurations, blow-up loci,
//!   nested sequences and the face structure of blown-up polytopes.
//! * [`complexes`] — face complexes with orientation quotients, the graph
//!   complexes built from stable graphs and nested sequences, and exact
//!   cellular homology.
//! * [`torelli`] — the tropical Torelli map on cells and its face-level
//!   compatibility checks.
//! * [`canforms`] — the exterior algebra of bi-invariant trace forms and
//!   Monte-Carlo integration of those forms over cones.
//!
//! All homology-grade computations are carried out in exact arithmetic
//! ([`exactlin`]); floating point appears only in the numerical
//! integration layer.

pub mod canforms;
pub mod cli;
pub mod complexes;
pub mod exactlin;
pub mod graphs;
pub mod polyhedral;
pub mod quadforms;
pub mod torelli;
