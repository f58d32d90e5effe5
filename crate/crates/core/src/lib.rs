//! Simulation and exact-solving toolkit for the Painter-Builder proper
//! k-colouring game.
//!
//! Painter and Builder alternate on an initially empty graph over n
//! vertices, Painter first: she colours a vertex with one of k colours,
//! he adds an edge, and the graph must stay properly coloured throughout.
//! Painter wins by colouring everything; Builder wins the moment some
//! uncoloured vertex sees all k colours in its neighbourhood. The crate
//! provides the rules engine, the strategy agents for both sides, an exact
//! minimax oracle for tiny boards, bit-exact transcripts with a structural
//! auditor, and a batch harness that puts the closed-form bounds next to
//! empirical results.

pub mod builder;
pub mod events;
pub mod game;
pub mod harness;
pub mod invariants;
pub mod painter;
pub mod rng;
pub mod runner;
pub mod solver;
pub mod stats;
pub mod transcript;

pub use builder::{BuilderConstants, BuilderKind, BuilderStrategy};
pub use game::{Colour, Edge, GameConfig, GameState, GameStatus, Vertex};
pub use painter::{PainterKind, PainterStrategy};
pub use runner::{GameRunner, Outcome};
pub use solver::{k_min_exact, solve_game, Winner};
