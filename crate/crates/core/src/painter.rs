//! Painter agents behind a single strategy interface: given the current
//! state, Builder's last move, and a seeded stream, produce the whole
//! Painter turn.
//!
//! Agents always return legal moves when one exists. A `Forfeit` is returned
//! only when the strategy's chosen vertex has no available colour, which the
//! engine's early loss detection normally pre-empts; it is kept as a distinct
//! signal so the harness can attribute losses.

use std::str::FromStr;

use crate::game::{Colour, Edge, GameState, Vertex};
use crate::rng::SplitMix64;

/// The paints for one Painter turn, or a forfeit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PainterTurn {
    Paints(Vec<(Vertex, Colour)>),
    Forfeit,
}

pub trait PainterStrategy {
    fn name(&self) -> &'static str;
    /// Produce the whole turn: exactly `state.paints_left()` paints, applied
    /// in order by the runner, or a forfeit.
    fn paint_turn(&mut self, state: &GameState, last_build: Option<&[Edge]>) -> PainterTurn;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PainterKind {
    RandomGreedy,
    BiasedWeighted,
    TwoForOne,
    FirstFit,
}

impl PainterKind {
    pub const ALL: [PainterKind; 4] = [
        PainterKind::RandomGreedy,
        PainterKind::BiasedWeighted,
        PainterKind::TwoForOne,
        PainterKind::FirstFit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PainterKind::RandomGreedy => "random-greedy",
            PainterKind::BiasedWeighted => "biased-weighted",
            PainterKind::TwoForOne => "two-for-one",
            PainterKind::FirstFit => "first-fit",
        }
    }

    pub fn instantiate(self, seed: u64) -> Box<dyn PainterStrategy> {
        match self {
            PainterKind::RandomGreedy => Box::new(RandomGreedyPainter::new(seed)),
            PainterKind::BiasedWeighted => Box::new(BiasedWeightedPainter::new(seed)),
            PainterKind::TwoForOne => Box::new(TwoForOnePainter::new()),
            PainterKind::FirstFit => Box::new(FirstFitPainter::new()),
        }
    }
}

impl FromStr for PainterKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PainterKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown painter agent '{s}'"))
    }
}

/// Cursor over the lowest uncoloured vertex; colouring is permanent, so the
/// cursor never moves backwards and scans amortise over the game.
#[derive(Clone, Debug)]
struct LowCursor(Vertex);

impl LowCursor {
    fn new() -> Self {
        LowCursor(1)
    }

    fn lowest_uncoloured(&mut self, state: &GameState) -> Option<Vertex> {
        while self.0 <= state.n() && state.is_coloured(self.0) {
            self.0 += 1;
        }
        (self.0 <= state.n()).then_some(self.0)
    }
}

/// Pad a partial turn with first-fit paints until `paints_left` is reached,
/// tracking colours chosen earlier in the same turn.
fn pad_first_fit(state: &GameState, paints: &mut Vec<(Vertex, Colour)>) -> bool {
    while (paints.len() as u32) < state.paints_left() {
        let done: Vec<Vertex> = paints.iter().map(|&(v, _)| v).collect();
        let pick = state.vertices().find_map(|v| {
            if state.is_coloured(v) || done.contains(&v) {
                return None;
            }
            smallest_colour_given(state, v, paints).map(|c| (v, c))
        });
        match pick {
            Some(p) => paints.push(p),
            None => return false,
        }
    }
    true
}

/// Smallest colour legal for `v` given earlier paints of the same turn.
fn smallest_colour_given(
    state: &GameState,
    v: Vertex,
    earlier: &[(Vertex, Colour)],
) -> Option<Colour> {
    (1..=state.k()).find(|&c| {
        if state.neighbourhood_has_colour(v, c) {
            return false;
        }
        !earlier
            .iter()
            .any(|&(w, wc)| wc == c && state.is_edge(v, w))
    })
}

/// Greedy-random strategy: react to the endpoints of the last edge, take the
/// uncoloured one (or a fair coin when both are), otherwise the lowest
/// uncoloured vertex; always use the smallest available colour.
pub struct RandomGreedyPainter {
    rng: SplitMix64,
    low: LowCursor,
}

impl RandomGreedyPainter {
    pub fn new(seed: u64) -> Self {
        RandomGreedyPainter {
            rng: SplitMix64::new(seed),
            low: LowCursor::new(),
        }
    }

    fn choose_vertex(&mut self, state: &GameState, last_build: Option<&[Edge]>) -> Option<Vertex> {
        if let Some(edges) = last_build {
            if let Some(&(u, v)) = edges.last() {
                let (cu, cv) = (state.is_coloured(u), state.is_coloured(v));
                match (cu, cv) {
                    (false, false) => {
                        return Some(if self.rng.coin() { v } else { u });
                    }
                    (false, true) => return Some(u),
                    (true, false) => return Some(v),
                    (true, true) => {}
                }
            }
        }
        self.low.lowest_uncoloured(state)
    }
}

impl PainterStrategy for RandomGreedyPainter {
    fn name(&self) -> &'static str {
        "random-greedy"
    }

    fn paint_turn(&mut self, state: &GameState, last_build: Option<&[Edge]>) -> PainterTurn {
        let v = match self.choose_vertex(state, last_build) {
            Some(v) => v,
            None => return PainterTurn::Forfeit,
        };
        let c = match state.smallest_legal_colour(v) {
            Some(c) => c,
            None => return PainterTurn::Forfeit,
        };
        let mut paints = vec![(v, c)];
        if !pad_first_fit(state, &mut paints) {
            return PainterTurn::Forfeit;
        }
        PainterTurn::Paints(paints)
    }
}

/// Pick an uncoloured endpoint `u` of the last Build move with probability
/// `deg(u) / (2b)`, degree taken in the subgraph of those edges. Residual
/// mass (coloured endpoints, short moves, no move yet) falls through to the
/// lowest uncoloured vertex, which only raises selection probabilities.
pub struct BiasedWeightedPainter {
    rng: SplitMix64,
    low: LowCursor,
}

impl BiasedWeightedPainter {
    pub fn new(seed: u64) -> Self {
        BiasedWeightedPainter {
            rng: SplitMix64::new(seed),
            low: LowCursor::new(),
        }
    }
}

/// The uncoloured endpoint owning position `roll` of the `2b` probability
/// slots, endpoints in ascending vertex order, `deg` slots each. Exposed for
/// exact distribution tests.
pub fn weighted_endpoint(
    state: &GameState,
    last_edges: &[Edge],
    roll: u64,
) -> Option<Vertex> {
    let mut endpoints: Vec<(Vertex, u64)> = Vec::new();
    for &(u, v) in last_edges {
        for w in [u, v] {
            match endpoints.iter_mut().find(|(x, _)| *x == w) {
                Some((_, d)) => *d += 1,
                None => endpoints.push((w, 1)),
            }
        }
    }
    endpoints.sort_unstable_by_key(|&(v, _)| v);
    let mut cum = 0u64;
    for (v, d) in endpoints {
        if state.is_coloured(v) {
            cum += d;
            continue;
        }
        if roll < cum + d {
            if roll >= cum {
                return Some(v);
            }
            return None;
        }
        cum += d;
    }
    None
}

impl PainterStrategy for BiasedWeightedPainter {
    fn name(&self) -> &'static str {
        "biased-weighted"
    }

    fn paint_turn(&mut self, state: &GameState, last_build: Option<&[Edge]>) -> PainterTurn {
        let b = state.config().b as u64;
        let roll = self.rng.gen_range(2 * b);
        let chosen = last_build
            .and_then(|edges| weighted_endpoint(state, edges, roll))
            .or_else(|| self.low.lowest_uncoloured(state));
        let v = match chosen {
            Some(v) => v,
            None => return PainterTurn::Forfeit,
        };
        let c = match state.smallest_legal_colour(v) {
            Some(c) => c,
            None => return PainterTurn::Forfeit,
        };
        let mut paints = vec![(v, c)];
        if !pad_first_fit(state, &mut paints) {
            return PainterTurn::Forfeit;
        }
        PainterTurn::Paints(paints)
    }
}

/// Two paints per edge: keep every endpoint of every edge coloured, so the
/// last edge always carries both colours and no vertex ever sees both colour
/// classes. Spare paints go to the lowest uncoloured isolated vertices.
pub struct TwoForOnePainter;

impl TwoForOnePainter {
    pub fn new() -> Self {
        TwoForOnePainter
    }
}

impl Default for TwoForOnePainter {
    fn default() -> Self {
        TwoForOnePainter
    }
}

impl PainterStrategy for TwoForOnePainter {
    fn name(&self) -> &'static str {
        "two-for-one"
    }

    fn paint_turn(&mut self, state: &GameState, last_build: Option<&[Edge]>) -> PainterTurn {
        let budget = state.paints_left() as usize;
        let mut paints: Vec<(Vertex, Colour)> = Vec::new();

        // First priority: uncoloured endpoints of the last edge.
        if let Some(&(u, v)) = last_build.and_then(|e| e.last()) {
            for w in [u.min(v), u.max(v)] {
                if paints.len() < budget && !state.is_coloured(w) {
                    match smallest_colour_given(state, w, &paints) {
                        Some(c) => paints.push((w, c)),
                        None => return PainterTurn::Forfeit,
                    }
                }
            }
        }

        // Spare paints: lowest uncoloured isolated vertices, colour 1.
        while paints.len() < budget {
            let done: Vec<Vertex> = paints.iter().map(|&(v, _)| v).collect();
            let isolated = state.vertices().find(|&v| {
                !state.is_coloured(v) && state.is_isolated(v) && !done.contains(&v)
            });
            match isolated {
                Some(v) => paints.push((v, 1)),
                None => break,
            }
        }

        // Off the strategy's guaranteed path (non-isolated uncoloured vertex
        // left over): stay legal with first-fit.
        if !pad_first_fit(state, &mut paints) {
            return PainterTurn::Forfeit;
        }
        PainterTurn::Paints(paints)
    }
}

/// Baseline: lowest uncoloured vertex with a legal colour, smallest colour.
pub struct FirstFitPainter {
    /// Everything below is coloured or dead, both permanent.
    cursor: Vertex,
}

impl FirstFitPainter {
    pub fn new() -> Self {
        FirstFitPainter { cursor: 1 }
    }
}

impl Default for FirstFitPainter {
    fn default() -> Self {
        Self::new()
    }
}

impl PainterStrategy for FirstFitPainter {
    fn name(&self) -> &'static str {
        "first-fit"
    }

    fn paint_turn(&mut self, state: &GameState, _last_build: Option<&[Edge]>) -> PainterTurn {
        if state.paints_left() == 1 {
            while self.cursor <= state.n() {
                let v = self.cursor;
                match state.smallest_legal_colour(v) {
                    Some(c) if !state.is_coloured(v) => {
                        return PainterTurn::Paints(vec![(v, c)]);
                    }
                    _ => self.cursor += 1,
                }
            }
            return PainterTurn::Forfeit;
        }
        let mut paints = Vec::new();
        if !pad_first_fit(state, &mut paints) {
            return PainterTurn::Forfeit;
        }
        PainterTurn::Paints(paints)
    }
}
