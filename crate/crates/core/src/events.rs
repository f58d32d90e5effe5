//! Game events: the moves and phase annotations a finished or in-progress
//! game emits, in the order they happened. Transcripts serialise these.

use serde::{Deserialize, Serialize};

use crate::game::{Colour, Edge, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Painter,
    Builder,
}

/// A single move. A `Build` with an empty edge list is a pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Paint { vertex: Vertex, colour: Colour },
    Build { edges: Vec<Edge> },
}

/// Phase annotations emitted by Builder agents so the auditor knows where to
/// evaluate structural certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mark {
    /// A waiting room (a, b) was completed: `a` monochromatic in `colour`,
    /// matched perfectly onto `b`, after `builder_moves` Builder moves.
    WaitingRoom {
        a: Vec<Vertex>,
        b: Vec<Vertex>,
        colour: Colour,
        builder_moves: u32,
    },
    /// The escalation reached `level`: every member is uncoloured with at
    /// least `level` distinctly coloured neighbours. `prev_count` is the size
    /// of the level below at the moment the step started.
    Escalation {
        level: u32,
        members: Vec<Vertex>,
        prev_count: u32,
    },
    /// One clique phase finished: `apexes` span a clique, each joined to
    /// every vertex of the uncoloured `pool`; `floor` is the guaranteed pool
    /// size from the phase schedule.
    CliqueLevel {
        apexes: Vec<Vertex>,
        pool: Vec<Vertex>,
        floor: u64,
    },
    /// The final clique certified by the biased Builder.
    CliqueFinal { clique: Vec<Vertex> },
}

/// Whether a mark describes the position before or after the Builder move it
/// was produced with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    BeforeMove,
    AfterMove,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Move { actor: Actor, action: Action },
    Mark(Mark),
}
