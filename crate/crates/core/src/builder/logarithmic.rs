//! The full logarithmic Builder: waiting room, then the escalation ladder
//! level by level, stalling in the room whenever the procedure has to wait.
//! Reaching level k would hand a vertex all k colours, which the engine
//! already declares as the win the moment it happens.
//!
//! On boards too small for the configured constants the agent degrades
//! gracefully: it stalls in the room while pairs remain and otherwise plays
//! the lowest legal pair that keeps the game graph 2-colourable, so the
//! bipartiteness guarantee survives outside the proven regime as well.

use super::escalation::{EscMachine, EscStep, EscalationState};
use super::room::{stall_in_waiting_room, RoomMachine, RoomStep, WaitingRoom};
use super::{BuilderConstants, BuilderStrategy, SafeFallback};
use crate::events::{Mark, Placement};
use crate::game::{Edge, GameState};

enum Phase {
    Start,
    /// k = 1: any edge from a coloured vertex to an uncoloured one wins.
    KillShot,
    Room(RoomMachine),
    EscalateInit(EscalationState),
    Escalating(EscMachine),
    Fallback,
}

pub struct LogarithmicBuilder {
    constants: BuilderConstants,
    phase: Phase,
    room: Option<WaitingRoom>,
    marks: Vec<(Placement, Mark)>,
}

impl LogarithmicBuilder {
    pub fn new(constants: BuilderConstants) -> Self {
        LogarithmicBuilder {
            constants,
            phase: Phase::Start,
            room: None,
            marks: Vec::new(),
        }
    }

    pub fn with_defaults() -> Self {
        Self::new(BuilderConstants::default())
    }

    /// Lowest (uncoloured, coloured) non-adjacent pair; with one colour this
    /// kills the uncoloured endpoint outright.
    fn kill_edge(state: &GameState, taken: &[Edge]) -> Option<Edge> {
        for u in state.vertices().filter(|&u| !state.is_coloured(u)) {
            for w in state.vertices().filter(|&w| state.is_coloured(w)) {
                let e = crate::game::edge(u, w);
                if state.is_legal_pair(u, w) && !taken.contains(&e) {
                    return Some(e);
                }
            }
        }
        None
    }

    fn fallback_edge(&mut self, state: &GameState, taken: &[Edge]) -> Option<Edge> {
        if let Some(room) = self.room.as_mut() {
            while let Ok(e) = stall_in_waiting_room(state, room) {
                if !taken.contains(&e) {
                    return Some(e);
                }
            }
        }
        SafeFallback::safe_pair(state, taken)
    }

    /// One edge from the plan, advancing phases as they complete.
    fn plan_edge(&mut self, state: &GameState, taken: &[Edge]) -> Option<Edge> {
        loop {
            match &mut self.phase {
                Phase::Start => {
                    if state.k() == 1 {
                        self.phase = Phase::KillShot;
                    } else {
                        match RoomMachine::new(state, &self.constants) {
                            Ok(machine) => self.phase = Phase::Room(machine),
                            Err(_) => self.phase = Phase::Fallback,
                        }
                    }
                }
                Phase::KillShot => {
                    return Self::kill_edge(state, taken)
                        .or_else(|| self.fallback_edge(state, taken));
                }
                Phase::Room(machine) => match machine.step(state) {
                    Ok(RoomStep::Edge(e)) => return Some(e),
                    Ok(RoomStep::Certified(e, room)) => {
                        self.marks.push((
                            Placement::AfterMove,
                            Mark::WaitingRoom {
                                a: room.a.clone(),
                                b: room.b.clone(),
                                colour: room.colour,
                                builder_moves: state.builder_moves() + 1,
                            },
                        ));
                        self.room = Some(room);
                        // The ladder starts from the isolated uncoloured
                        // vertices left over; evaluated at the next turn.
                        self.phase = Phase::EscalateInit(EscalationState {
                            level: 0,
                            members: Vec::new(),
                            prev_count: 0,
                        });
                        return Some(e);
                    }
                    Err(_) => self.phase = Phase::Fallback,
                },
                Phase::EscalateInit(esc) => {
                    let esc = if esc.level == 0 && esc.members.is_empty() {
                        EscalationState::base(state)
                    } else {
                        esc.clone()
                    };
                    match EscMachine::new(state, &esc, &self.constants) {
                        Ok(machine) => self.phase = Phase::Escalating(machine),
                        Err(_) => self.phase = Phase::Fallback,
                    }
                }
                Phase::Escalating(machine) => {
                    let room = match self.room.as_mut() {
                        Some(r) => r,
                        None => {
                            self.phase = Phase::Fallback;
                            continue;
                        }
                    };
                    match machine.step(state, room) {
                        Ok(EscStep::Edge(e)) => {
                            if taken.contains(&e) {
                                // Same edge proposed twice in one turn: the
                                // plan is stale within this turn, pad instead.
                                return self.fallback_edge(state, taken);
                            }
                            return Some(e);
                        }
                        Ok(EscStep::Reached(next)) => {
                            self.marks.push((
                                Placement::BeforeMove,
                                Mark::Escalation {
                                    level: next.level,
                                    members: next.members.clone(),
                                    prev_count: next.prev_count,
                                },
                            ));
                            self.phase = Phase::EscalateInit(next);
                        }
                        Err(_) => self.phase = Phase::Fallback,
                    }
                }
                Phase::Fallback => return self.fallback_edge(state, taken),
            }
        }
    }
}

impl BuilderStrategy for LogarithmicBuilder {
    fn name(&self) -> &'static str {
        "logarithmic"
    }

    fn build_turn(&mut self, state: &GameState) -> Vec<Edge> {
        let b = state.config().b as usize;
        let mut edges: Vec<Edge> = Vec::with_capacity(b);
        if let Some(e) = self.plan_edge(state, &edges) {
            edges.push(e);
        }
        while edges.len() < b {
            match self.fallback_edge(state, &edges) {
                Some(e) => edges.push(e),
                None => break,
            }
        }
        edges
    }

    fn take_marks(&mut self) -> Vec<(Placement, Mark)> {
        std::mem::take(&mut self.marks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameConfig, GameStatus};
    use crate::invariants;
    use crate::painter::PainterKind;
    use crate::runner::GameRunner;

    #[test]
    fn one_colour_builder_wins_immediately() {
        for n in [3u32, 5, 9] {
            let mut painter = PainterKind::FirstFit.instantiate(0);
            let mut builder = LogarithmicBuilder::with_defaults();
            let cfg = GameConfig::unbiased(n, 1).unwrap();
            let (outcome, _) = GameRunner::new(cfg, painter.as_mut(), &mut builder)
                .unwrap()
                .run()
                .unwrap();
            assert_eq!(outcome.status, GameStatus::BuilderWin);
            assert!(outcome.rounds <= 2);
        }
    }

    #[test]
    fn small_board_fallback_stays_bipartite() {
        // n = 16 is below the room threshold: the agent falls back for the
        // whole game and the graph must stay 2-colourable throughout.
        let mut painter = PainterKind::RandomGreedy.instantiate(21);
        let mut builder = LogarithmicBuilder::with_defaults();
        let cfg = GameConfig::unbiased(16, 5).unwrap();
        let mut driver = crate::runner::BuilderDriver::new(cfg, painter.as_mut()).unwrap();
        while !driver.over() {
            let edges = builder.build_turn(driver.state());
            driver.play(&edges).unwrap();
            assert!(invariants::is_bipartite(driver.state()));
        }
    }

    #[test]
    fn mid_board_game_keeps_graph_bipartite() {
        let mut painter = PainterKind::FirstFit.instantiate(0);
        let mut builder = LogarithmicBuilder::with_defaults();
        let cfg = GameConfig::unbiased(80, 2).unwrap();
        let mut driver = crate::runner::BuilderDriver::new(cfg, painter.as_mut()).unwrap();
        while !driver.over() {
            let edges = builder.build_turn(driver.state());
            driver.play(&edges).unwrap();
            assert!(invariants::is_bipartite(driver.state()));
        }
    }
}
