//! Colour-neighbourhood escalation: convert a large set of uncoloured
//! vertices that each see t distinct colours into a guaranteed fraction that
//! each see t + 1, without ever joining two vertices of the same component
//! and without creating cycles outside the waiting room.
//!
//! The step, evaluated on the live position throughout:
//!
//! 0. If enough members already see t + 1 colours, promote them directly.
//! 1. Otherwise match members of equal colour set ("class") pairwise, for as
//!    long as possible.
//! 2. Matched edges with exactly one coloured endpoint promote their
//!    uncoloured endpoint: the partner's colour is new to it.
//! 3. Otherwise split on the class profile of the fully uncoloured edges:
//!    - one class holds a third or more: stall in the waiting room until a
//!      sixth of its edges get a coloured endpoint, then match those coloured
//!      vertices onto still-strict vertices of the same class (their colour
//!      is absent there), promoting the targets;
//!    - classes are all small: pick a class-separated sixth-to-third of the
//!      edges, and for each stretch a coloured neighbour carrying a colour
//!      the target class lacks onto a target edge, promoting the targets.
//!
//! Every branch only ever draws edges between distinct tree components, plus
//! stall edges inside the room, so the graph stays bipartite and cycle-free
//! outside A x B. Promotions always take at most one vertex per matched
//! edge, keeping the new level's members in pairwise distinct components.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::room::{stall_in_waiting_room, RoomError, WaitingRoom};
use super::BuilderConstants;
use crate::game::{Colour, Edge, GameState, GameStatus, Vertex};
use crate::invariants;
use crate::runner::{BuilderDriver, DriveError};

/// One level of the escalation ladder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationState {
    /// Every member is uncoloured with at least `level` distinctly coloured
    /// neighbours at the moment the state was produced.
    pub level: u32,
    pub members: Vec<Vertex>,
    /// Size of the previous level when the step that produced this one
    /// started (0 at the base level).
    pub prev_count: u32,
}

impl EscalationState {
    /// The base of the ladder: all isolated uncoloured vertices.
    pub fn base(state: &GameState) -> Self {
        EscalationState {
            level: 0,
            members: state
                .vertices()
                .filter(|&v| state.is_isolated(v) && !state.is_coloured(v))
                .collect(),
            prev_count: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum EscalateError {
    #[error("level {level} must stay below the palette size {k}")]
    LevelAtPalette { level: u32, k: u32 },
    #[error("level {level} has {size} members, needs more than {needed}")]
    LevelTooSmall { level: u32, size: u64, needed: u64 },
    #[error("no same-class pair to match and no branch condition met")]
    Stuck,
    #[error(transparent)]
    Room(#[from] RoomError),
    #[error("step postcondition failed: {0}")]
    Postcondition(String),
    #[error("game ended during the step: {0:?}")]
    GameEnded(GameStatus),
    #[error(transparent)]
    Drive(#[from] DriveError),
}

/// A matched pair with the colour set its endpoints shared when matched.
#[derive(Clone, Debug)]
struct MatchedEdge {
    u: Vertex,
    v: Vertex,
    class: Vec<Colour>,
}

impl MatchedEdge {
    fn coloured_endpoints(&self, state: &GameState) -> u32 {
        state.is_coloured(self.u) as u32 + state.is_coloured(self.v) as u32
    }
}

pub(crate) enum EscStep {
    Edge(Edge),
    Reached(EscalationState),
}

struct ClassBucket {
    key: Vec<Colour>,
    members: Vec<Vertex>,
}

enum Sub {
    /// Step 0 fired at construction: promote without moving.
    Promote(Vec<Vertex>),
    Match {
        classes: Vec<ClassBucket>,
        matched: Vec<MatchedEdge>,
        /// Indexed by vertex - 1; true once covered by the matching.
        in_matching: Vec<bool>,
    },
    Case1Stall {
        edges: Vec<MatchedEdge>,
        need: usize,
    },
    Case1Match {
        pairs: Vec<(Vertex, MatchedEdge)>,
        next: usize,
    },
    Case2Match {
        sel: Vec<MatchedEdge>,
        rest: Vec<MatchedEdge>,
        next: usize,
    },
}

pub(crate) struct EscMachine {
    constants: BuilderConstants,
    level: u32,
    start_count: u32,
    sub: Sub,
}

fn binom(k: u64, t: u64) -> u128 {
    if t > k {
        return 0;
    }
    let t = t.min(k - t);
    let mut acc: u128 = 1;
    for i in 0..t {
        acc = acc.saturating_mul((k - i) as u128) / (i as u128 + 1);
    }
    acc
}

impl EscMachine {
    /// Check the step preconditions against the live position and take the
    /// cost-free promotion when it is already available.
    pub fn new(
        state: &GameState,
        esc: &EscalationState,
        constants: &BuilderConstants,
    ) -> Result<Self, EscalateError> {
        let level = esc.level;
        if level >= state.k() {
            return Err(EscalateError::LevelAtPalette {
                level,
                k: state.k(),
            });
        }
        let mut live: Vec<Vertex> = esc
            .members
            .iter()
            .copied()
            .filter(|&v| !state.is_coloured(v))
            .collect();
        live.sort_unstable();
        let n_t = live.len() as u64;
        let needed = (2 * binom(state.k() as u64, level as u64))
            .max(constants.min_level_size as u128);
        if (n_t as u128) <= needed {
            return Err(EscalateError::LevelTooSmall {
                level,
                size: n_t,
                needed: needed.min(u64::MAX as u128) as u64,
            });
        }

        let promoted: Vec<Vertex> = live
            .iter()
            .copied()
            .filter(|&v| state.neighbourhood_colours(v) > level)
            .collect();
        let sub = if constants.shrink.lt_mul(promoted.len() as u64, n_t) {
            Sub::Promote(promoted)
        } else {
            let mut by_set: BTreeMap<Vec<Colour>, Vec<Vertex>> = BTreeMap::new();
            for &v in &live {
                if state.neighbourhood_colours(v) == level {
                    by_set
                        .entry(state.neighbourhood_colour_set(v))
                        .or_default()
                        .push(v);
                }
            }
            Sub::Match {
                classes: by_set
                    .into_iter()
                    .map(|(key, members)| ClassBucket { key, members })
                    .collect(),
                matched: Vec::new(),
                in_matching: vec![false; state.n() as usize],
            }
        };
        Ok(EscMachine {
            constants: constants.clone(),
            level,
            start_count: n_t as u32,
            sub,
        })
    }

    fn reach(&self, mut members: Vec<Vertex>) -> Result<EscStep, EscalateError> {
        members.sort_unstable();
        members.dedup();
        if !self
            .constants
            .shrink
            .lt_mul(members.len() as u64, self.start_count as u64)
        {
            return Err(EscalateError::Postcondition(format!(
                "level {} kept {} of {} members, below the shrink guarantee",
                self.level + 1,
                members.len(),
                self.start_count
            )));
        }
        Ok(EscStep::Reached(EscalationState {
            level: self.level + 1,
            members,
            prev_count: self.start_count,
        }))
    }

    pub fn step(
        &mut self,
        state: &GameState,
        room: &mut WaitingRoom,
    ) -> Result<EscStep, EscalateError> {
        loop {
            match &mut self.sub {
                Sub::Promote(members) => {
                    let members = members.clone();
                    return self.reach(members);
                }

                Sub::Match {
                    classes,
                    matched,
                    in_matching,
                } => {
                    // Lowest same-class pair, both live: uncoloured, still at
                    // exactly `level` colours (their set then still equals
                    // the frozen class key), unmatched. Dead candidates never
                    // revive, so buckets are compacted as they are scanned.
                    let level = self.level;
                    let mut found: Option<(Vec<Colour>, Vertex, Vertex)> = None;
                    for bucket in classes.iter_mut() {
                        bucket.members.retain(|&v| {
                            !state.is_coloured(v)
                                && state.neighbourhood_colours(v) == level
                                && !in_matching[(v - 1) as usize]
                        });
                        if bucket.members.len() >= 2 {
                            found =
                                Some((bucket.key.clone(), bucket.members[0], bucket.members[1]));
                            break;
                        }
                    }
                    if let Some((class, u, v)) = found {
                        in_matching[(u - 1) as usize] = true;
                        in_matching[(v - 1) as usize] = true;
                        matched.push(MatchedEdge { u, v, class });
                        return Ok(EscStep::Edge(crate::game::edge(u, v)));
                    }

                    // Matching exhausted: classify the matched edges.
                    let one_coloured: Vec<Vertex> = matched
                        .iter()
                        .filter(|m| m.coloured_endpoints(state) == 1)
                        .filter_map(|m| {
                            let w = if state.is_coloured(m.u) { m.v } else { m.u };
                            (state.neighbourhood_colours(w) > level).then_some(w)
                        })
                        .collect();
                    let zero: Vec<MatchedEdge> = matched
                        .iter()
                        .filter(|m| m.coloured_endpoints(state) == 0)
                        .cloned()
                        .collect();

                    if self
                        .constants
                        .shrink
                        .lt_mul(one_coloured.len() as u64, self.start_count as u64)
                    {
                        return self.reach(one_coloured);
                    }

                    let m = zero.len();
                    if m == 0 {
                        return Err(EscalateError::Stuck);
                    }
                    let mut per_class: BTreeMap<Vec<Colour>, Vec<usize>> = BTreeMap::new();
                    for (i, e) in zero.iter().enumerate() {
                        per_class.entry(e.class.clone()).or_default().push(i);
                    }
                    let dominant = per_class
                        .values()
                        .find(|idxs| 3 * idxs.len() >= m)
                        .cloned();

                    if let Some(idxs) = dominant {
                        // Case 1: one class holds at least a third.
                        let edges: Vec<MatchedEdge> =
                            idxs.iter().map(|&i| zero[i].clone()).collect();
                        let need = edges.len() / 6;
                        self.sub = Sub::Case1Stall { edges, need };
                    } else {
                        // Case 2: classes all small; a single class inside
                        // the sixth-to-third window, or a greedy union of
                        // classes landing there.
                        let mut sel_idx: Vec<usize> = Vec::new();
                        for idxs in per_class.values() {
                            if 6 * idxs.len() >= m && 3 * idxs.len() <= m {
                                sel_idx = idxs.clone();
                                break;
                            }
                        }
                        if sel_idx.is_empty() {
                            for idxs in per_class.values() {
                                sel_idx.extend(idxs.iter().copied());
                                if 6 * sel_idx.len() >= m {
                                    break;
                                }
                            }
                        }
                        let sel: Vec<MatchedEdge> =
                            sel_idx.iter().map(|&i| zero[i].clone()).collect();
                        let mut rest: Vec<MatchedEdge> = (0..zero.len())
                            .filter(|i| !sel_idx.contains(i))
                            .map(|i| zero[i].clone())
                            .collect();
                        rest.truncate(sel.len());
                        self.sub = Sub::Case2Match {
                            sel,
                            rest,
                            next: 0,
                        };
                    }
                }

                Sub::Case1Stall { edges, need } => {
                    let touched: Vec<usize> = edges
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| e.coloured_endpoints(state) >= 1)
                        .map(|(i, _)| i)
                        .collect();
                    if touched.len() < *need {
                        let e = stall_in_waiting_room(state, room)?;
                        return Ok(EscStep::Edge(e));
                    }
                    let m_prime = edges.len();
                    let m_two = *need;
                    let rem: Vec<MatchedEdge> = edges
                        .iter()
                        .filter(|e| e.coloured_endpoints(state) == 0)
                        .cloned()
                        .collect();

                    // Enough of the untouched edges may already hold a
                    // promoted vertex.
                    let direct = promote_per_edge(state, rem.iter(), self.level);
                    if direct.len() >= (m_prime - m_two) / 2
                        && self
                            .constants
                            .shrink
                            .lt_mul(direct.len() as u64, self.start_count as u64)
                    {
                        return self.reach(direct);
                    }

                    // Match a coloured vertex of each touched edge onto a
                    // still-strict vertex of an untouched one. Same class,
                    // so the source colour cannot appear around the target.
                    let level = self.level;
                    let sources: Vec<Vertex> = touched
                        .iter()
                        .take(m_two.max(1))
                        .map(|&i| {
                            let e = &edges[i];
                            if state.is_coloured(e.u) {
                                e.u
                            } else {
                                e.v
                            }
                        })
                        .collect();
                    let targets: Vec<MatchedEdge> = rem
                        .iter()
                        .filter(|e| {
                            [e.u, e.v].into_iter().any(|w| {
                                !state.is_coloured(w)
                                    && state.neighbourhood_colours(w) == level
                            })
                        })
                        .take(sources.len())
                        .cloned()
                        .collect();
                    let pairs: Vec<(Vertex, MatchedEdge)> =
                        sources.into_iter().zip(targets).collect();
                    if pairs.is_empty() {
                        return Err(EscalateError::Stuck);
                    }
                    self.sub = Sub::Case1Match { pairs, next: 0 };
                }

                Sub::Case1Match { pairs, next } => {
                    let level = self.level;
                    while *next < pairs.len() {
                        let (source, target_edge) = pairs[*next].clone();
                        *next += 1;
                        let Some(colour) = state.colour_of(source) else {
                            continue;
                        };
                        let target = [target_edge.u, target_edge.v].into_iter().find(|&w| {
                            !state.is_coloured(w)
                                && state.neighbourhood_colours(w) == level
                                && !state.neighbourhood_has_colour(w, colour)
                        });
                        if let Some(t) = target {
                            if state.is_legal_pair(source, t) {
                                return Ok(EscStep::Edge(crate::game::edge(source, t)));
                            }
                        }
                    }
                    // All matches placed: promote one vertex per target edge.
                    let edges: Vec<MatchedEdge> =
                        pairs.iter().map(|(_, e)| e.clone()).collect();
                    let members = promote_per_edge(state, edges.iter(), self.level);
                    return self.reach(members);
                }

                Sub::Case2Match { sel, rest, next } => {
                    let level = self.level;
                    while *next < rest.len() {
                        let i = *next;
                        *next += 1;
                        let target_edge = rest[i].clone();
                        let source_edge = sel[i].clone();
                        let target = [target_edge.u, target_edge.v]
                            .into_iter()
                            .find(|&w| !state.is_coloured(w));
                        let Some(target) = target else { continue };
                        // A colour the source class has and the target class
                        // lacks, and its carrier next to the source edge.
                        let colour = source_edge
                            .class
                            .iter()
                            .copied()
                            .find(|c| !target_edge.class.contains(c));
                        let Some(colour) = colour else { continue };
                        let w = [source_edge.u, source_edge.v]
                            .into_iter()
                            .flat_map(|x| state.neighbours(x).iter().copied())
                            .filter(|&nb| state.colour_of(nb) == Some(colour))
                            .min();
                        let Some(w) = w else { continue };
                        if state.is_legal_pair(w, target)
                            && !state.neighbourhood_has_colour(target, colour)
                            && state.neighbourhood_colours(target) == level
                        {
                            return Ok(EscStep::Edge(crate::game::edge(w, target)));
                        }
                    }
                    let edges: Vec<MatchedEdge> = rest.clone();
                    let members = promote_per_edge(state, edges.iter(), self.level);
                    return self.reach(members);
                }
            }
        }
    }
}

/// One promoted vertex per matched edge: the uncoloured endpoint that now
/// sees more than `level` colours, if any. One per edge keeps promoted
/// vertices in pairwise distinct components.
fn promote_per_edge<'a>(
    state: &GameState,
    edges: impl Iterator<Item = &'a MatchedEdge>,
    level: u32,
) -> Vec<Vertex> {
    edges
        .filter_map(|e| {
            [e.u, e.v].into_iter().find(|&w| {
                !state.is_coloured(w) && state.neighbourhood_colours(w) > level
            })
        })
        .collect()
}

/// Check the four step postconditions on the live position.
pub fn verify_escalation(
    state: &GameState,
    room_a: &[Vertex],
    room_b: &[Vertex],
    next: &EscalationState,
    constants: &BuilderConstants,
) -> Result<(), String> {
    if next.prev_count > 0
        && !constants
            .shrink
            .lt_mul(next.members.len() as u64, next.prev_count as u64)
    {
        return Err(format!(
            "size {} not above shrink of previous {}",
            next.members.len(),
            next.prev_count
        ));
    }
    for &v in &next.members {
        if state.is_coloured(v) {
            return Err(format!("member {v} is coloured"));
        }
        let seen = invariants::colour_neighbourhood_size(state, v);
        if seen < next.level {
            return Err(format!(
                "member {v} sees {seen} colours, needs {}",
                next.level
            ));
        }
        if !invariants::component_is_tree(state, v) {
            return Err(format!("component of member {v} is not a tree"));
        }
    }
    if !invariants::pairwise_distinct_components(state, &next.members) {
        return Err("two members share a component".into());
    }
    if !invariants::cycles_confined_to(state, room_a, room_b) {
        return Err("a cycle escapes the waiting room".into());
    }
    Ok(())
}

/// Driver-style form of the step: runs the machine against a live Painter
/// until the next level is reached, verifying the postconditions.
pub fn escalate_step(
    driver: &mut BuilderDriver,
    room: &mut WaitingRoom,
    esc: &EscalationState,
    constants: &BuilderConstants,
) -> Result<EscalationState, EscalateError> {
    let mut machine = EscMachine::new(driver.state(), esc, constants)?;
    loop {
        match machine.step(driver.state(), room)? {
            EscStep::Edge(e) => {
                let status = driver.play(&[e])?;
                if status != GameStatus::Ongoing {
                    return Err(EscalateError::GameEnded(status));
                }
            }
            EscStep::Reached(next) => {
                verify_escalation(driver.state(), &room.a, &room.b, &next, constants)
                    .map_err(EscalateError::Postcondition)?;
                let mark = crate::events::Mark::Escalation {
                    level: next.level,
                    members: next.members.clone(),
                    prev_count: next.prev_count,
                };
                driver.events.push(crate::events::Event::Mark(mark));
                return Ok(next);
            }
        }
    }
}
