//! Exact minimax oracle for tiny boards: the optimal-play winner and the
//! minimal palette size, memoized over a canonical state encoding that
//! quotients out colour permutations and colouring-preserving vertex
//! relabellings. Without that reduction even six vertices are out of reach.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{ConfigError, GameConfig, GameState, GameStatus, Turn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Painter,
    Builder,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("board size {n} exceeds the solver cap {cap}")]
    CapExceeded { n: u32, cap: u32 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Board-size caps. Exact search is exponential; these keep a full table
/// tractable on a desk machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverLimits {
    pub max_n_unbiased: u32,
    pub max_n_biased: u32,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_n_unbiased: 6,
            max_n_biased: 5,
        }
    }
}

impl SolverLimits {
    fn cap(&self, config: &GameConfig) -> u32 {
        if config.p == 1 && config.b == 1 {
            self.max_n_unbiased
        } else {
            self.max_n_biased
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRow {
    pub n: u32,
    pub k: u32,
    pub p: u32,
    pub b: u32,
    pub winner: Winner,
}

/// Winner of `config` under optimal play by both sides.
pub fn solve_game(config: GameConfig, limits: &SolverLimits) -> Result<Winner, SolveError> {
    GameConfig::new(config.n, config.k, config.p, config.b)?;
    let cap = limits.cap(&config);
    if config.n > cap {
        return Err(SolveError::CapExceeded { n: config.n, cap });
    }
    let mut searcher = Searcher::new(config.n);
    let state = GameState::new(config)?;
    Ok(searcher.winner(&state))
}

/// Smallest palette size in 1..=n that lets Painter win the (p : b) game.
/// Extra colours never hurt Painter, so the first win is the threshold.
pub fn k_min_exact(n: u32, p: u32, b: u32, limits: &SolverLimits) -> Result<u32, SolveError> {
    for k in 1..=n {
        let config = GameConfig::new(n, k, p, b)?;
        if solve_game(config, limits)? == Winner::Painter {
            return Ok(k);
        }
    }
    // Painter trivially wins the n-colouring game, so the loop cannot fall
    // through; keep the bound anyway.
    Ok(n)
}

/// The full winner table over a grid of board and palette sizes.
pub fn solve_table(
    max_n: u32,
    max_k: u32,
    p: u32,
    b: u32,
    limits: &SolverLimits,
) -> Result<Vec<SolveRow>, SolveError> {
    let mut rows = Vec::new();
    for n in 2..=max_n {
        for k in 1..=max_k.min(n) {
            let config = GameConfig::new(n, k, p, b)?;
            let winner = solve_game(config, limits)?;
            rows.push(SolveRow { n, k, p, b, winner });
        }
    }
    Ok(rows)
}

/// Canonical encoding: minimum over all vertex permutations of the packed
/// (adjacency, colour pattern, turn phase) word, with colours renamed by
/// first appearance under each permutation. Two positions that differ only
/// by a colour permutation plus a relabelling therefore encode identically.
struct Searcher {
    memo: HashMap<u64, Winner>,
    perms: Vec<Vec<u8>>,
    n: usize,
}

impl Searcher {
    fn new(n: u32) -> Self {
        Searcher {
            memo: HashMap::new(),
            perms: permutations(n as usize),
            n: n as usize,
        }
    }

    fn canonical_key(&self, state: &GameState) -> u64 {
        let n = self.n;
        let mut best = u64::MAX;
        let mut renamed = vec![0u8; n];
        for perm in &self.perms {
            // Colour renaming by first appearance in permuted order.
            let mut map = [0u8; 8];
            let mut next = 1u8;
            for (slot, &orig) in perm.iter().enumerate() {
                let c = state.colour_of(orig as u32 + 1).unwrap_or(0) as usize;
                renamed[slot] = if c == 0 {
                    0
                } else {
                    if map[c] == 0 {
                        map[c] = next;
                        next += 1;
                    }
                    map[c]
                };
            }
            let mut key: u64 = 0;
            let mut bit = 0u32;
            for i in 0..n {
                for j in (i + 1)..n {
                    if state.is_edge(perm[i] as u32 + 1, perm[j] as u32 + 1) {
                        key |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            for &c in renamed.iter().take(n) {
                key = key << 3 | c as u64;
            }
            key = key << 3
                | match state.turn() {
                    Turn::Painter => state.paints_left() as u64,
                    Turn::Builder => 0,
                };
            if key < best {
                best = key;
            }
        }
        best
    }

    fn winner(&mut self, state: &GameState) -> Winner {
        match state.status() {
            GameStatus::PainterWin => return Winner::Painter,
            GameStatus::BuilderWin => return Winner::Builder,
            GameStatus::Ongoing => {}
        }
        let key = self.canonical_key(state);
        if let Some(&w) = self.memo.get(&key) {
            return w;
        }
        let result = match state.turn() {
            Turn::Painter => self.painter_to_move(state),
            Turn::Builder => self.builder_to_move(state),
        };
        self.memo.insert(key, result);
        result
    }

    fn painter_to_move(&mut self, state: &GameState) -> Winner {
        let mut seen_children = HashSet::new();
        for v in state.vertices() {
            if state.is_coloured(v) {
                continue;
            }
            for c in state.legal_colours(v).expect("uncoloured vertex") {
                let mut next = state.clone();
                next.apply_paint(v, c).expect("legal paint");
                if !seen_children.insert(self.canonical_key(&next)) {
                    continue;
                }
                if self.winner(&next) == Winner::Painter {
                    return Winner::Painter;
                }
            }
        }
        // No paint wins; if no paint even exists, every uncoloured vertex is
        // dead, which status() has already turned into a Builder win.
        Winner::Builder
    }

    fn builder_to_move(&mut self, state: &GameState) -> Winner {
        let pairs = state.enumerate_legal_pairs();
        let take = (state.config().b as usize).min(pairs.len());
        let mut combo = Vec::with_capacity(take);
        let mut seen = HashSet::new();
        // A move is any `take`-subset of the legal pairs; take = 0 is the
        // forced pass. Children are deduplicated by canonical key.
        if self.builder_wins_some_combo(state, &pairs, take, 0, &mut combo, &mut seen) {
            Winner::Builder
        } else {
            Winner::Painter
        }
    }

    fn builder_wins_some_combo(
        &mut self,
        state: &GameState,
        pairs: &[(u32, u32)],
        take: usize,
        start: usize,
        combo: &mut Vec<(u32, u32)>,
        seen: &mut HashSet<u64>,
    ) -> bool {
        if combo.len() == take {
            let mut next = state.clone();
            next.apply_build(combo).expect("legal build");
            let key = self.canonical_key(&next);
            if !seen.insert(key) {
                return false;
            }
            return self.winner(&next) == Winner::Builder;
        }
        for i in start..pairs.len() {
            if pairs.len() - i < take - combo.len() {
                break;
            }
            combo.push(pairs[i]);
            let won = self.builder_wins_some_combo(state, pairs, take, i + 1, combo, seen);
            combo.pop();
            if won {
                return true;
            }
        }
        false
    }
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut items: Vec<u8> = (0..n as u8).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> SolverLimits {
        SolverLimits::default()
    }

    #[test]
    fn two_vertices_one_colour_is_a_builder_win() {
        let cfg = GameConfig::new(2, 1, 1, 1).unwrap();
        assert_eq!(solve_game(cfg, &limits()).unwrap(), Winner::Builder);
    }

    #[test]
    fn two_vertices_two_colours_is_a_painter_win() {
        let cfg = GameConfig::new(2, 2, 1, 1).unwrap();
        assert_eq!(solve_game(cfg, &limits()).unwrap(), Winner::Painter);
    }

    #[test]
    fn three_vertices_two_colours_is_a_painter_win() {
        let cfg = GameConfig::new(3, 2, 1, 1).unwrap();
        assert_eq!(solve_game(cfg, &limits()).unwrap(), Winner::Painter);
    }

    #[test]
    fn k_min_of_two_vertices_is_two() {
        assert_eq!(k_min_exact(2, 1, 1, &limits()).unwrap(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = GameConfig::new(9, 2, 1, 1).unwrap();
        assert_eq!(
            solve_game(cfg, &limits()),
            Err(SolveError::CapExceeded { n: 9, cap: 6 })
        );
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(5).len(), 120);
    }

    #[test]
    fn canonical_key_is_colour_permutation_invariant() {
        let cfg = GameConfig::new(4, 3, 1, 1).unwrap();
        let mut a = GameState::new(cfg).unwrap();
        a.apply_paint(1, 1).unwrap();
        a.apply_build(&[(1, 2)]).unwrap();
        a.apply_paint(2, 2).unwrap();
        let mut b = GameState::new(cfg).unwrap();
        b.apply_paint(1, 3).unwrap();
        b.apply_build(&[(1, 2)]).unwrap();
        b.apply_paint(2, 1).unwrap();
        let searcher = Searcher::new(4);
        assert_eq!(searcher.canonical_key(&a), searcher.canonical_key(&b));
    }

    #[test]
    fn canonical_key_is_relabelling_invariant() {
        let cfg = GameConfig::new(4, 2, 1, 1).unwrap();
        let mut a = GameState::new(cfg).unwrap();
        a.apply_paint(1, 1).unwrap();
        a.apply_build(&[(3, 4)]).unwrap();
        let mut b = GameState::new(cfg).unwrap();
        b.apply_paint(2, 1).unwrap();
        b.apply_build(&[(1, 4)]).unwrap();
        let searcher = Searcher::new(4);
        assert_eq!(searcher.canonical_key(&a), searcher.canonical_key(&b));
    }

    #[test]
    fn canonical_key_separates_inequivalent_states() {
        // Equal keys exactly when some vertex relabelling plus colour
        // permutation carries one position onto the other; brute force on a
        // sample of reachable n = 4 positions.
        let cfg = GameConfig::new(4, 3, 1, 1).unwrap();
        let mut states: Vec<GameState> = Vec::new();
        let mut rng = crate::rng::SplitMix64::new(99);
        for _ in 0..40 {
            let mut g = GameState::new(cfg).unwrap();
            for _ in 0..3 {
                if g.status() != GameStatus::Ongoing {
                    break;
                }
                let moves: Vec<(u32, u32)> = g
                    .vertices()
                    .filter(|&v| !g.is_coloured(v))
                    .flat_map(|v| {
                        g.legal_colours(v).unwrap().into_iter().map(move |c| (v, c))
                    })
                    .collect();
                let (v, c) = moves[rng.gen_range(moves.len() as u64) as usize];
                g.apply_paint(v, c).unwrap();
                let pairs = g.enumerate_legal_pairs();
                if pairs.is_empty() || g.status() != GameStatus::Ongoing {
                    break;
                }
                let e = pairs[rng.gen_range(pairs.len() as u64) as usize];
                g.apply_build(&[e]).unwrap();
            }
            states.push(g);
        }

        fn equivalent(a: &GameState, b: &GameState) -> bool {
            if a.turn() != b.turn() || a.paints_left() != b.paints_left() {
                return false;
            }
            let verts: Vec<u32> = (1..=4).collect();
            for perm in permutations(4) {
                // Colour map induced by the relabelling must be a consistent
                // injection.
                let mut map = [0u32; 8];
                let mut ok = true;
                for (i, &v) in verts.iter().enumerate() {
                    let img = perm[i] as u32 + 1;
                    match (a.colour_of(v), b.colour_of(img)) {
                        (None, None) => {}
                        (Some(ca), Some(cb)) => {
                            if map[ca as usize] == 0 {
                                if map.contains(&cb) {
                                    ok = false;
                                    break;
                                }
                                map[ca as usize] = cb;
                            } else if map[ca as usize] != cb {
                                ok = false;
                                break;
                            }
                        }
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let edges_match = verts.iter().all(|&u| {
                    verts.iter().all(|&v| {
                        u >= v
                            || a.is_edge(u, v)
                                == b.is_edge(perm[(u - 1) as usize] as u32 + 1, perm[(v - 1) as usize] as u32 + 1)
                    })
                });
                if edges_match {
                    return true;
                }
            }
            false
        }

        let searcher = Searcher::new(4);
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                let same_key =
                    searcher.canonical_key(&states[i]) == searcher.canonical_key(&states[j]);
                assert_eq!(
                    same_key,
                    equivalent(&states[i], &states[j]),
                    "key/equivalence mismatch between sampled states {i} and {j}"
                );
            }
        }
    }
}
