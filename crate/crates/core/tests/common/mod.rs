//! Shared test helpers: the plain exhaustive game-tree oracle and a
//! uniformly random legal Painter for adversarial agent checks.
#![allow(dead_code)]

use pbgame_core::game::{Edge, GameState, GameStatus, Turn, Vertex};
use pbgame_core::painter::{PainterStrategy, PainterTurn};
use pbgame_core::rng::SplitMix64;
use pbgame_core::solver::Winner;

/// Plain exhaustive search: no memoisation, no canonicalisation, no move
/// deduplication. Intractable beyond tiny boards, which is the point: it is
/// an independent check on the solver's reductions.
pub fn exhaustive_winner(state: &GameState) -> Winner {
    match state.status() {
        GameStatus::PainterWin => return Winner::Painter,
        GameStatus::BuilderWin => return Winner::Builder,
        GameStatus::Ongoing => {}
    }
    match state.turn() {
        Turn::Painter => {
            for v in state.vertices() {
                if state.is_coloured(v) {
                    continue;
                }
                for c in state.legal_colours(v).expect("uncoloured") {
                    let mut next = state.clone();
                    next.apply_paint(v, c).expect("legal paint");
                    if exhaustive_winner(&next) == Winner::Painter {
                        return Winner::Painter;
                    }
                }
            }
            Winner::Builder
        }
        Turn::Builder => {
            let pairs = state.enumerate_legal_pairs();
            let take = (state.config().b as usize).min(pairs.len());
            let mut combo = Vec::with_capacity(take);
            if builder_wins(state, &pairs, take, 0, &mut combo) {
                Winner::Builder
            } else {
                Winner::Painter
            }
        }
    }
}

fn builder_wins(
    state: &GameState,
    pairs: &[Edge],
    take: usize,
    start: usize,
    combo: &mut Vec<Edge>,
) -> bool {
    if combo.len() == take {
        let mut next = state.clone();
        next.apply_build(combo).expect("legal build");
        return exhaustive_winner(&next) == Winner::Builder;
    }
    for i in start..pairs.len() {
        if pairs.len() - i < take - combo.len() {
            break;
        }
        combo.push(pairs[i]);
        let won = builder_wins(state, pairs, take, i + 1, combo);
        combo.pop();
        if won {
            return true;
        }
    }
    false
}

/// Uniformly random legal paints each turn; an adversarially unstructured
/// opponent for Builder legality checks.
pub struct RandomLegalPainter {
    rng: SplitMix64,
}

impl RandomLegalPainter {
    pub fn new(seed: u64) -> Self {
        RandomLegalPainter {
            rng: SplitMix64::new(seed),
        }
    }
}

impl PainterStrategy for RandomLegalPainter {
    fn name(&self) -> &'static str {
        "random-legal"
    }

    fn paint_turn(&mut self, state: &GameState, _last: Option<&[Edge]>) -> PainterTurn {
        let budget = state.paints_left() as usize;
        let mut paints: Vec<(Vertex, u32)> = Vec::with_capacity(budget);
        while paints.len() < budget {
            let done: Vec<Vertex> = paints.iter().map(|&(v, _)| v).collect();
            let mut options: Vec<(Vertex, u32)> = Vec::new();
            for v in state.vertices() {
                if state.is_coloured(v) || done.contains(&v) {
                    continue;
                }
                for c in 1..=state.k() {
                    if state.neighbourhood_has_colour(v, c) {
                        continue;
                    }
                    if paints.iter().any(|&(w, wc)| wc == c && state.is_edge(v, w)) {
                        continue;
                    }
                    options.push((v, c));
                }
            }
            if options.is_empty() {
                return PainterTurn::Forfeit;
            }
            let pick = options[self.rng.gen_range(options.len() as u64) as usize];
            paints.push(pick);
        }
        PainterTurn::Paints(paints)
    }
}
