//! The biased clique Builder: with b edges per turn, grow a clique one apex
//! at a time by wiring the whole surviving uncoloured pool to a fresh apex
//! chosen from it. The pool sizes follow the schedule
//! `n_0 = n, n_{i+1} = n_i - ceil((n_i - 1) / b) - 1`, and the construction
//! runs for t = max{ i : n_i > 0 } phases, certifying a clique on t + 1
//! vertices against any Painter in the (1 : b) game. A properly coloured
//! clique needs as many colours as vertices, so Painter cannot win with
//! fewer.

use serde::{Deserialize, Serialize};

use super::BuilderStrategy;
use crate::events::{Mark, Placement};
use crate::game::{Edge, GameState, Vertex};

/// The guaranteed pool sizes and phase count for a given board and bias.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSchedule {
    /// floors[j] is the guaranteed size of the j-th pool; floors[0] = n.
    pub floors: Vec<u64>,
    /// Number of completable phases; the final clique has t + 1 vertices.
    pub t: u32,
}

/// Evaluate the pool-size recurrence.
pub fn clique_schedule(n: u64, b: u64) -> CliqueSchedule {
    let mut floors = vec![n];
    let mut cur = n;
    while cur > 0 {
        cur = cur - (cur - 1).div_ceil(b) - 1;
        floors.push(cur);
    }
    let t = floors.iter().rposition(|&x| x > 0).unwrap_or(0) as u32;
    CliqueSchedule { floors, t }
}

enum Phase {
    Idle,
    Attaching {
        apex: Vertex,
        /// Scan position inside the pool; pool vertices are attached in
        /// ascending order and never revisited.
        scan: usize,
        attached: Vec<Vertex>,
    },
    Done,
}

/// Next attachable pool vertex at or after `scan`, without consuming it.
/// Skipped entries (coloured, or already wired to the apex) never become
/// attachable again, so advancing past them is permanent.
fn next_target(
    pool: &[Vertex],
    scan: &mut usize,
    state: &GameState,
    apex: Vertex,
) -> Option<Vertex> {
    while *scan < pool.len() {
        let v = pool[*scan];
        if v != apex && !state.is_coloured(v) && !state.is_edge(apex, v) {
            return Some(v);
        }
        *scan += 1;
    }
    None
}

pub struct CliqueBuilder {
    schedule: Option<CliqueSchedule>,
    apexes: Vec<Vertex>,
    pool: Vec<Vertex>,
    phase: Phase,
    marks: Vec<(Placement, Mark)>,
    /// Lowest pair that may still be legal for padding; legality of a pair
    /// never comes back, so the cursor is monotone.
    pad_cursor: (Vertex, Vertex),
    /// The pool floors hold only in the (1 : b) game, where Painter colours
    /// one vertex per round. With p > 1 the construction still runs but
    /// certifies no floor.
    floors_guaranteed: bool,
}

impl CliqueBuilder {
    pub fn new() -> Self {
        CliqueBuilder {
            schedule: None,
            apexes: Vec::new(),
            pool: Vec::new(),
            phase: Phase::Idle,
            marks: Vec::new(),
            pad_cursor: (1, 2),
            floors_guaranteed: true,
        }
    }

    pub fn schedule(&self) -> Option<&CliqueSchedule> {
        self.schedule.as_ref()
    }

    /// Lowest legal pad pair, preferring pairs that avoid `avoid` so the
    /// pool keeps its colour headroom. Pair illegality (existing edge, or
    /// two identically coloured endpoints) never reverses, so the cursor
    /// skips dead pairs permanently and the scans amortise.
    fn pad_edge(&mut self, state: &GameState, taken: &[Edge], avoid: &[Vertex]) -> Option<Edge> {
        let n = state.n();
        let next_pair = |(u, v): (Vertex, Vertex)| {
            if v < n {
                (u, v + 1)
            } else {
                (u + 1, u + 2)
            }
        };
        while self.pad_cursor.0 < n && !state.is_legal_pair(self.pad_cursor.0, self.pad_cursor.1)
        {
            self.pad_cursor = next_pair(self.pad_cursor);
        }
        let mut fallback: Option<Edge> = None;
        let mut cur = self.pad_cursor;
        while cur.0 < n {
            let (u, v) = cur;
            if state.is_legal_pair(u, v) && !taken.contains(&(u, v)) {
                if !avoid.contains(&u) && !avoid.contains(&v) {
                    return Some((u, v));
                }
                if fallback.is_none() {
                    fallback = Some((u, v));
                }
            }
            cur = next_pair(cur);
        }
        fallback
    }

    fn start_phase(&mut self, state: &GameState) {
        let schedule = self.schedule.as_ref().expect("schedule set");
        if self.apexes.len() as u32 >= schedule.t {
            self.phase = Phase::Done;
            return;
        }
        let apex = self
            .pool
            .iter()
            .copied()
            .find(|&v| !state.is_coloured(v));
        match apex {
            Some(apex) => {
                self.phase = Phase::Attaching {
                    apex,
                    scan: 0,
                    attached: Vec::new(),
                };
            }
            None => self.phase = Phase::Done,
        }
    }

    /// Finish the running phase: fix the new pool and apex set, emit the
    /// certificates. `pending` are this turn's not-yet-applied attachments.
    fn complete_phase(&mut self, state: &GameState) {
        let (apex, attached) = match &self.phase {
            Phase::Attaching { apex, attached, .. } => (*apex, attached.clone()),
            _ => return,
        };
        self.apexes.push(apex);
        self.pool = attached
            .iter()
            .copied()
            .filter(|&v| !state.is_coloured(v))
            .collect();
        let schedule = self.schedule.as_ref().expect("schedule set");
        let j = self.apexes.len();
        let floor = if self.floors_guaranteed {
            schedule.floors.get(j).copied().unwrap_or(0)
        } else {
            0
        };
        self.marks.push((
            Placement::AfterMove,
            Mark::CliqueLevel {
                apexes: self.apexes.clone(),
                pool: self.pool.clone(),
                floor,
            },
        ));
        if j as u32 == schedule.t {
            // The clique is complete: the apexes plus any pool vertex.
            if let Some(&last) = self.pool.first() {
                let mut clique = self.apexes.clone();
                clique.push(last);
                self.marks
                    .push((Placement::AfterMove, Mark::CliqueFinal { clique }));
            }
            self.phase = Phase::Done;
        } else {
            self.phase = Phase::Idle;
        }
    }
}

impl Default for CliqueBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl BuilderStrategy for CliqueBuilder {
    fn name(&self) -> &'static str {
        "clique"
    }

    fn build_turn(&mut self, state: &GameState) -> Vec<Edge> {
        if self.schedule.is_none() {
            self.floors_guaranteed = state.config().p == 1;
            let schedule = clique_schedule(state.n() as u64, state.config().b as u64);
            if schedule.t == 0 {
                // Degenerate bias: the construction yields a single vertex.
                if let Some(v) = state.vertices().find(|&v| !state.is_coloured(v)) {
                    self.marks
                        .push((Placement::AfterMove, Mark::CliqueFinal { clique: vec![v] }));
                }
                self.phase = Phase::Done;
            } else {
                self.pool = state.vertices().collect();
            }
            self.schedule = Some(schedule);
        }
        let b = state.config().b as usize;
        let mut edges: Vec<Edge> = Vec::with_capacity(b);

        // A completed phase ends the structured part of the turn: the next
        // apex is only chosen once Painter has replied.
        'attach: while edges.len() < b {
            if matches!(self.phase, Phase::Idle) {
                self.start_phase(state);
            }
            match &mut self.phase {
                Phase::Attaching {
                    apex,
                    scan,
                    attached,
                } => {
                    let apex = *apex;
                    match next_target(&self.pool, scan, state, apex) {
                        Some(v) => {
                            *scan += 1;
                            attached.push(v);
                            edges.push(crate::game::edge(apex, v));
                        }
                        None => {
                            self.complete_phase(state);
                            break 'attach;
                        }
                    }
                }
                _ => break 'attach,
            }
        }

        // If the turn filled exactly as the attachments ran out, the phase
        // is complete now, at this move, not a Painter reply later.
        if edges.len() == b {
            let exhausted = match &mut self.phase {
                Phase::Attaching { apex, scan, .. } => {
                    let apex = *apex;
                    next_target(&self.pool, scan, state, apex).is_none()
                }
                _ => false,
            };
            if exhausted {
                self.complete_phase(state);
            }
        }

        // Pad the remainder of the turn away from the live pool.
        while edges.len() < b {
            let avoid = if matches!(self.phase, Phase::Done) {
                Vec::new()
            } else {
                self.pool.clone()
            };
            match self.pad_edge(state, &edges, &avoid) {
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
    use crate::painter::PainterKind;
    use crate::runner::GameRunner;

    #[test]
    fn schedule_matches_hand_evaluation() {
        // n=10, b=2: 10 -> 4 -> 1 -> 0, two completable phases, clique of 3.
        let s = clique_schedule(10, 2);
        assert_eq!(s.floors, vec![10, 4, 1, 0]);
        assert_eq!(s.t, 2);
        // b=1 collapses: n -> 0 in one phase, clique of 1.
        let s1 = clique_schedule(10, 1);
        assert_eq!(s1.t, 0);
        // n=10, b=5: 10 -> 7 -> 4 -> 2 -> 0.
        let s5 = clique_schedule(10, 5);
        assert_eq!(s5.floors, vec![10, 7, 4, 2, 0]);
        assert_eq!(s5.t, 3);
    }

    #[test]
    fn clique_bound_beats_formula() {
        // t + 1 > (b/2) ln(n/(2b) + 1) across a small grid.
        for (n, b) in [(10u64, 2u64), (50, 3), (200, 5), (1000, 2)] {
            let s = clique_schedule(n, b);
            let bound = (b as f64 / 2.0) * ((n as f64) / (2.0 * b as f64) + 1.0).ln();
            assert!(
                (s.t + 1) as f64 > bound,
                "n={n} b={b}: {} vs {bound}",
                s.t + 1
            );
        }
    }

    #[test]
    fn builds_the_scheduled_clique() {
        let schedule = clique_schedule(10, 2);
        let mut painter = PainterKind::FirstFit.instantiate(0);
        let mut builder = CliqueBuilder::new();
        let cfg = GameConfig::new(10, 19, 1, 2).unwrap();
        let mut driver = crate::runner::BuilderDriver::new(cfg, painter.as_mut()).unwrap();
        let mut final_clique: Option<Vec<Vertex>> = None;
        while !driver.over() {
            let edges = builder.build_turn(driver.state());
            let marks = builder.take_marks();
            for (_, m) in &marks {
                if let Mark::CliqueFinal { clique } = m {
                    final_clique = Some(clique.clone());
                }
            }
            driver.play(&edges).unwrap();
        }
        let clique = final_clique.expect("clique certified");
        assert_eq!(clique.len() as u32, schedule.t + 1);
        for i in 0..clique.len() {
            for j in (i + 1)..clique.len() {
                assert!(driver.state().is_edge(clique[i], clique[j]));
            }
        }
    }

    #[test]
    fn clique_builder_stays_legal_against_two_for_one() {
        let mut painter = PainterKind::TwoForOne.instantiate(0);
        let mut builder = CliqueBuilder::new();
        let cfg = GameConfig::new(30, 2, 2, 1).unwrap();
        let (outcome, _) = GameRunner::new(cfg, painter.as_mut(), &mut builder)
            .unwrap()
            .run()
            .unwrap();
        assert_eq!(outcome.status, GameStatus::PainterWin);
    }
}
