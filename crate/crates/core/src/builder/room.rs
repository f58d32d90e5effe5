//! Waiting-room construction and stalling.
//!
//! A waiting room (A, B) is a pair of equal-size disjoint independent sets,
//! matched perfectly onto each other, with A monochromatic. No vertex of B
//! can ever receive A's colour, so every unused A-B pair stays a legal edge:
//! a reservoir Builder draws from whenever he needs to pass time.
//!
//! Construction: an opening matching on ceil(n/10) rounds of fresh vertices;
//! then the t = ceil(n/(10 k)) lowest vertices of the largest colour class
//! become A, each joined to a fresh isolated uncoloured vertex, forming B.
//! The game graph stays a disjoint union of paths with at most two edges.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::BuilderConstants;
use crate::game::{Colour, Edge, GameState, GameStatus, Vertex};
use crate::runner::{BuilderDriver, DriveError};

#[derive(Debug, Error)]
pub enum RoomError {
    #[error("waiting room needs n > {min}, got n = {n}")]
    BoardTooSmall { n: u32, min: u64 },
    #[error("waiting room needs at least 2 colours, got k = {0}")]
    TooFewColours(u32),
    #[error("no pair of isolated uncoloured vertices for the opening matching")]
    NoMatchingPair,
    #[error("no isolated uncoloured vertex left to attach")]
    NoIsolatedVertex,
    #[error("largest colour class has {found} vertices, {needed} required")]
    ClassTooSmall { found: u64, needed: u64 },
    #[error("every waiting-room pair has been used")]
    Exhausted,
    #[error("game ended during room construction: {0:?}")]
    GameEnded(GameStatus),
    #[error(transparent)]
    Drive(#[from] DriveError),
}

/// A certified waiting room plus the cursor over its unused stall pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaitingRoom {
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    pub colour: Colour,
    #[serde(skip)]
    cursor: usize,
}

impl WaitingRoom {
    pub fn new(a: Vec<Vertex>, b: Vec<Vertex>, colour: Colour) -> Self {
        WaitingRoom {
            a,
            b,
            colour,
            cursor: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.a.len()
    }

    /// Check every waiting-room invariant against the live position.
    pub fn verify(&self, state: &GameState, constants: &BuilderConstants) -> Result<(), String> {
        verify_room(state, &self.a, &self.b, self.colour, constants)
    }
}

/// Structural certificate shared with the transcript auditor.
pub fn verify_room(
    state: &GameState,
    a: &[Vertex],
    b: &[Vertex],
    colour: Colour,
    constants: &BuilderConstants,
) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("|A| = {} differs from |B| = {}", a.len(), b.len()));
    }
    let needed = constants
        .room_fraction
        .ceil_mul_div(state.n() as u64, state.k() as u64);
    if (a.len() as u64) < needed {
        return Err(format!("room size {} below required {}", a.len(), needed));
    }
    for &v in a {
        if state.colour_of(v) != Some(colour) {
            return Err(format!("vertex {v} of A does not carry the room colour"));
        }
    }
    if b.iter().any(|v| a.contains(v)) {
        return Err("A and B intersect".into());
    }
    for set in [a, b] {
        for i in 0..set.len() {
            for j in (i + 1)..set.len() {
                if state.is_edge(set[i], set[j]) {
                    return Err(format!(
                        "({}, {}) is an edge inside an independent set",
                        set[i], set[j]
                    ));
                }
            }
        }
    }
    // Induced graph on A ∪ B must be exactly the matching a[i] - b[i].
    for (i, (&ai, &bi)) in a.iter().zip(b.iter()).enumerate() {
        if !state.is_edge(ai, bi) {
            return Err(format!("matching edge ({ai}, {bi}) missing"));
        }
        for (j, &bj) in b.iter().enumerate() {
            if i != j && state.is_edge(ai, bj) {
                return Err(format!("extra edge ({ai}, {bj}) inside the room"));
            }
        }
    }
    Ok(())
}

/// One unbiased stall edge: the lowest-index unused A-B pair. Legality is
/// guaranteed by the room invariant and rechecked against the live state.
pub fn stall_in_waiting_room(
    state: &GameState,
    room: &mut WaitingRoom,
) -> Result<Edge, RoomError> {
    let cols = room.b.len();
    while room.cursor < room.a.len() * cols {
        let (i, j) = (room.cursor / cols, room.cursor % cols);
        room.cursor += 1;
        let (u, v) = (room.a[i], room.b[j]);
        if state.is_legal_pair(u, v) {
            return Ok(crate::game::edge(u, v));
        }
    }
    Err(RoomError::Exhausted)
}

/// Stepwise room construction; shared by the per-move agent and the
/// driver-style operation.
pub(crate) struct RoomMachine {
    constants: BuilderConstants,
    phase: RoomPhase,
    /// Lowest vertex that may still be isolated and uncoloured; both
    /// properties only ever disappear, so the scan never revisits.
    fresh_cursor: Vertex,
}

enum RoomPhase {
    Match { made: u64, target: u64 },
    Attach { a: Vec<Vertex>, colour: Colour, b: Vec<Vertex> },
    Done,
}

pub(crate) enum RoomStep {
    Edge(Edge),
    /// The final edge together with the certified room.
    Certified(Edge, WaitingRoom),
}

/// Lowest vertex that is still isolated and uncoloured. Both properties only
/// ever disappear, so the cursor never moves backwards.
fn next_fresh(
    cursor: &mut Vertex,
    state: &GameState,
    skip: Option<Vertex>,
) -> Option<Vertex> {
    while *cursor <= state.n() {
        let v = *cursor;
        if state.is_isolated(v) && !state.is_coloured(v) && skip != Some(v) {
            return Some(v);
        }
        *cursor += 1;
    }
    None
}

impl RoomMachine {
    pub fn new(state: &GameState, constants: &BuilderConstants) -> Result<Self, RoomError> {
        let n = state.n() as u64;
        if n <= constants.min_room_n {
            return Err(RoomError::BoardTooSmall {
                n: state.n(),
                min: constants.min_room_n,
            });
        }
        if state.k() < 2 {
            return Err(RoomError::TooFewColours(state.k()));
        }
        Ok(RoomMachine {
            constants: constants.clone(),
            phase: RoomPhase::Match {
                made: 0,
                target: constants.room_fraction.ceil_mul(n),
            },
            fresh_cursor: 1,
        })
    }

    pub fn step(&mut self, state: &GameState) -> Result<RoomStep, RoomError> {
        loop {
            match &mut self.phase {
                RoomPhase::Match { made, target } if *made < *target => {
                    let u = next_fresh(&mut self.fresh_cursor, state, None)
                        .ok_or(RoomError::NoMatchingPair)?;
                    let mut second = u + 1;
                    let v = next_fresh(&mut second, state, Some(u))
                        .ok_or(RoomError::NoMatchingPair)?;
                    *made += 1;
                    return Ok(RoomStep::Edge(crate::game::edge(u, v)));
                }
                RoomPhase::Match { .. } => {
                    // Matching finished: pick A from the largest colour class.
                    let n = state.n() as u64;
                    let t = self
                        .constants
                        .room_fraction
                        .ceil_mul_div(n, state.k() as u64);
                    let mut class_size = vec![0u64; state.k() as usize + 1];
                    for v in state.vertices() {
                        if let Some(c) = state.colour_of(v) {
                            class_size[c as usize] += 1;
                        }
                    }
                    let colour = (1..=state.k())
                        .max_by_key(|&c| (class_size[c as usize], std::cmp::Reverse(c)))
                        .unwrap();
                    if class_size[colour as usize] < t {
                        return Err(RoomError::ClassTooSmall {
                            found: class_size[colour as usize],
                            needed: t,
                        });
                    }
                    let a: Vec<Vertex> = state
                        .vertices()
                        .filter(|&v| state.colour_of(v) == Some(colour))
                        .take(t as usize)
                        .collect();
                    self.phase = RoomPhase::Attach {
                        a,
                        colour,
                        b: Vec::new(),
                    };
                }
                RoomPhase::Attach { a, colour, b } => {
                    let target = a[b.len()];
                    let fresh = next_fresh(&mut self.fresh_cursor, state, None)
                        .ok_or(RoomError::NoIsolatedVertex)?;
                    let e = crate::game::edge(target, fresh);
                    b.push(fresh);
                    if b.len() == a.len() {
                        let room = WaitingRoom::new(a.clone(), b.clone(), *colour);
                        self.phase = RoomPhase::Done;
                        return Ok(RoomStep::Certified(e, room));
                    }
                    return Ok(RoomStep::Edge(e));
                }
                RoomPhase::Done => return Err(RoomError::Exhausted),
            }
        }
    }
}

/// Drive the full construction against a live Painter: the driver-style form
/// of the procedure. Returns the certified room; the game graph is then a
/// disjoint union of paths of length at most two.
pub fn build_waiting_room(
    driver: &mut BuilderDriver,
    constants: &BuilderConstants,
) -> Result<WaitingRoom, RoomError> {
    let mut machine = RoomMachine::new(driver.state(), constants)?;
    loop {
        match machine.step(driver.state())? {
            RoomStep::Edge(e) => {
                let status = driver.play(&[e])?;
                if status != GameStatus::Ongoing {
                    return Err(RoomError::GameEnded(status));
                }
            }
            RoomStep::Certified(e, room) => {
                let mark = crate::events::Mark::WaitingRoom {
                    a: room.a.clone(),
                    b: room.b.clone(),
                    colour: room.colour,
                    builder_moves: driver.state().builder_moves() + 1,
                };
                let status = driver.play_annotated(&[e], Vec::new(), vec![mark])?;
                if status != GameStatus::Ongoing {
                    return Err(RoomError::GameEnded(status));
                }
                return Ok(room);
            }
        }
    }
}
