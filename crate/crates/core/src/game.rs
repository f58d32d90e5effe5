//! Game state, move legality, and win/loss detection for the Painter-Builder
//! proper k-colouring game, covering both the unbiased game and the biased
//! (p : b) variant with truncated last moves.
//!
//! Rules enforced here:
//! - Painter moves first; each of her turns colours `min(p, uncoloured)`
//!   vertices, one vertex at a time, each with a colour absent from its
//!   neighbourhood.
//! - Builder adds exactly `b` edges per turn between previously unconnected,
//!   differently coloured (or uncoloured) vertices. When fewer legal pairs
//!   remain he must submit them all; when none remain he passes.
//! - Painter wins once all vertices are coloured. Builder wins as soon as an
//!   uncoloured vertex sees all k colours in its neighbourhood: such a vertex
//!   can never be coloured, so the game is decided immediately.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertices are the integers `1..=n`.
pub type Vertex = u32;
/// Colours are the integers `1..=k`.
pub type Colour = u32;
/// Normalised as `(lo, hi)` with `lo < hi`.
pub type Edge = (Vertex, Vertex);

/// Normalise an unordered pair into the canonical edge representation.
pub fn edge(u: Vertex, v: Vertex) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("board needs at least 2 vertices, got {0}")]
    TooFewVertices(u32),
    #[error("palette needs at least 1 colour")]
    EmptyPalette,
    #[error("painter bias must be at least 1")]
    ZeroPainterBias,
    #[error("builder bias must be at least 1")]
    ZeroBuilderBias,
}

/// Board size, palette size and the (p : b) biases. The unbiased game is
/// `p = 1, b = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub n: u32,
    pub k: u32,
    pub p: u32,
    pub b: u32,
}

impl GameConfig {
    pub fn new(n: u32, k: u32, p: u32, b: u32) -> Result<Self, ConfigError> {
        if n < 2 {
            return Err(ConfigError::TooFewVertices(n));
        }
        if k < 1 {
            return Err(ConfigError::EmptyPalette);
        }
        if p < 1 {
            return Err(ConfigError::ZeroPainterBias);
        }
        if b < 1 {
            return Err(ConfigError::ZeroBuilderBias);
        }
        Ok(GameConfig { n, k, p, b })
    }

    pub fn unbiased(n: u32, k: u32) -> Result<Self, ConfigError> {
        Self::new(n, k, 1, 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Turn {
    Painter,
    Builder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    Ongoing,
    PainterWin,
    BuilderWin,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("game is already over")]
    GameOver,
    #[error("it is not Painter's turn")]
    NotPaintersTurn,
    #[error("it is not Builder's turn")]
    NotBuildersTurn,
    #[error("vertex {0} is outside 1..=n")]
    VertexOutOfRange(Vertex),
    #[error("vertex {0} is already coloured")]
    AlreadyColoured(Vertex),
    #[error("vertex {0} is not coloured")]
    NotColoured(Vertex),
    #[error("colour {0} is outside the palette 1..=k")]
    ColourOutOfRange(Colour),
    #[error("colour {colour} already appears in the neighbourhood of vertex {vertex}")]
    ColourClash { vertex: Vertex, colour: Colour },
    #[error("edge joins vertex {0} to itself")]
    SelfLoop(Vertex),
    #[error("edge ({0}, {1}) already exists")]
    EdgeExists(Vertex, Vertex),
    #[error("edge ({0}, {1}) appears twice in one move")]
    DuplicateEdge(Vertex, Vertex),
    #[error("edge ({0}, {1}) would join two vertices of colour {2}")]
    MonochromaticEdge(Vertex, Vertex, Colour),
    #[error("builder submitted {submitted} edges but {expected} are required")]
    WrongEdgeCount { submitted: usize, expected: usize },
}

/// Full game position. Confined to one logical thread; cheap to clone at the
/// board sizes the exact solver uses.
#[derive(Clone, Debug)]
pub struct GameState {
    config: GameConfig,
    /// Per-vertex colour, 0 = uncoloured. Index `v - 1`.
    colour: Vec<Colour>,
    adj: Vec<Vec<Vertex>>,
    edge_set: HashSet<Edge>,
    edge_list: Vec<Edge>,
    /// Bitset of colours present in each vertex's neighbourhood,
    /// `words_per_vertex` words per vertex.
    nbr_words: Vec<u64>,
    words_per_vertex: usize,
    /// Number of distinct colours in each vertex's neighbourhood.
    distinct: Vec<u32>,
    /// Uncoloured vertices whose neighbourhood carries all k colours.
    dead: BTreeSet<Vertex>,
    uncoloured: u32,
    turn: Turn,
    paints_left: u32,
    round: u32,
    status: GameStatus,
    painter_moves: u32,
    builder_moves: u32,
}

impl GameState {
    /// Fresh game: no edges, nothing coloured, Painter to move.
    pub fn new(config: GameConfig) -> Result<Self, ConfigError> {
        GameConfig::new(config.n, config.k, config.p, config.b)?;
        let n = config.n as usize;
        let words = (config.k as usize).div_ceil(64);
        Ok(GameState {
            config,
            colour: vec![0; n],
            adj: vec![Vec::new(); n],
            edge_set: HashSet::new(),
            edge_list: Vec::new(),
            nbr_words: vec![0; n * words],
            words_per_vertex: words,
            distinct: vec![0; n],
            dead: BTreeSet::new(),
            uncoloured: config.n,
            turn: Turn::Painter,
            paints_left: config.p.min(config.n),
            round: 0,
            status: GameStatus::Ongoing,
            painter_moves: 0,
            builder_moves: 0,
        })
    }

    pub fn config(&self) -> GameConfig {
        self.config
    }

    pub fn n(&self) -> u32 {
        self.config.n
    }

    pub fn k(&self) -> u32 {
        self.config.k
    }

    pub fn status(&self) -> GameStatus {
        self.status
    }

    pub fn turn(&self) -> Turn {
        self.turn
    }

    /// Completed full rounds (a round ends with Builder's move).
    pub fn round(&self) -> u32 {
        self.round
    }

    /// Paint actions remaining in the current Painter turn.
    pub fn paints_left(&self) -> u32 {
        self.paints_left
    }

    pub fn painter_moves(&self) -> u32 {
        self.painter_moves
    }

    pub fn builder_moves(&self) -> u32 {
        self.builder_moves
    }

    pub fn uncoloured_count(&self) -> u32 {
        self.uncoloured
    }

    pub fn coloured_count(&self) -> u32 {
        self.config.n - self.uncoloured
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.config.n
    }

    pub fn colour_of(&self, v: Vertex) -> Option<Colour> {
        let c = self.colour[(v - 1) as usize];
        if c == 0 {
            None
        } else {
            Some(c)
        }
    }

    pub fn is_coloured(&self, v: Vertex) -> bool {
        self.colour[(v - 1) as usize] != 0
    }

    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adj[(v - 1) as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[(v - 1) as usize].len()
    }

    pub fn is_isolated(&self, v: Vertex) -> bool {
        self.adj[(v - 1) as usize].is_empty()
    }

    pub fn is_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && self.edge_set.contains(&edge(u, v))
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[Edge] {
        &self.edge_list
    }

    fn word_index(&self, v: Vertex, c: Colour) -> (usize, u64) {
        let bit = (c - 1) as usize;
        (
            (v - 1) as usize * self.words_per_vertex + bit / 64,
            1u64 << (bit % 64),
        )
    }

    /// Does colour `c` appear among the neighbours of `v`?
    pub fn neighbourhood_has_colour(&self, v: Vertex, c: Colour) -> bool {
        let (w, m) = self.word_index(v, c);
        self.nbr_words[w] & m != 0
    }

    /// Number of distinct colours among the neighbours of `v`.
    pub fn neighbourhood_colours(&self, v: Vertex) -> u32 {
        self.distinct[(v - 1) as usize]
    }

    /// The sorted set of colours present among the neighbours of `v`.
    pub fn neighbourhood_colour_set(&self, v: Vertex) -> Vec<Colour> {
        (1..=self.config.k)
            .filter(|&c| self.neighbourhood_has_colour(v, c))
            .collect()
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), MoveError> {
        if v < 1 || v > self.config.n {
            Err(MoveError::VertexOutOfRange(v))
        } else {
            Ok(())
        }
    }

    /// Colours legal for the uncoloured vertex `v`: the palette minus the
    /// colours in its neighbourhood.
    pub fn legal_colours(&self, v: Vertex) -> Result<Vec<Colour>, MoveError> {
        self.check_vertex(v)?;
        if self.is_coloured(v) {
            return Err(MoveError::AlreadyColoured(v));
        }
        Ok((1..=self.config.k)
            .filter(|&c| !self.neighbourhood_has_colour(v, c))
            .collect())
    }

    /// Smallest colour legal for `v`, or None when `v` is coloured or dead.
    pub fn smallest_legal_colour(&self, v: Vertex) -> Option<Colour> {
        if self.is_coloured(v) {
            return None;
        }
        (1..=self.config.k).find(|&c| !self.neighbourhood_has_colour(v, c))
    }

    /// Uncoloured vertices whose neighbourhood carries all k colours.
    /// Maintained incrementally; a nonempty result means Builder has won.
    pub fn dead_vertices(&self) -> Vec<Vertex> {
        self.dead.iter().copied().collect()
    }

    /// Recompute the dead set from the adjacency structure alone. Oracle for
    /// the incremental bookkeeping.
    pub fn recompute_dead_vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for v in self.vertices() {
            if self.is_coloured(v) {
                continue;
            }
            let mut seen = BTreeSet::new();
            for &u in self.neighbours(v) {
                if let Some(c) = self.colour_of(u) {
                    seen.insert(c);
                }
            }
            if seen.len() as u32 == self.config.k {
                out.push(v);
            }
        }
        out
    }

    /// Is the unordered pair `(u, v)` playable by Builder right now?
    pub fn is_legal_pair(&self, u: Vertex, v: Vertex) -> bool {
        if u == v || u < 1 || v < 1 || u > self.config.n || v > self.config.n {
            return false;
        }
        if self.edge_set.contains(&edge(u, v)) {
            return false;
        }
        match (self.colour_of(u), self.colour_of(v)) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        }
    }

    /// All currently legal Builder pairs, lexicographically ordered.
    /// Quadratic in n; used for truncated-move validation and tiny boards.
    pub fn enumerate_legal_pairs(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for u in 1..self.config.n {
            for v in (u + 1)..=self.config.n {
                if self.is_legal_pair(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// True when at least one legal Builder pair exists.
    pub fn legal_pair_exists(&self) -> bool {
        for u in 1..self.config.n {
            for v in (u + 1)..=self.config.n {
                if self.is_legal_pair(u, v) {
                    return true;
                }
            }
        }
        false
    }

    fn insert_nbr_colour(&mut self, v: Vertex, c: Colour) {
        let (w, m) = self.word_index(v, c);
        if self.nbr_words[w] & m == 0 {
            self.nbr_words[w] |= m;
            let idx = (v - 1) as usize;
            self.distinct[idx] += 1;
            if self.colour[idx] == 0 && self.distinct[idx] == self.config.k {
                self.dead.insert(v);
            }
        }
    }

    fn refresh_status(&mut self) {
        if self.status != GameStatus::Ongoing {
            return;
        }
        if self.uncoloured == 0 {
            self.status = GameStatus::PainterWin;
        } else if !self.dead.is_empty() {
            self.status = GameStatus::BuilderWin;
        }
    }

    /// Painter colours `v` with `c`. One vertex per call; the turn passes to
    /// Builder after `min(p, uncoloured)` paints.
    pub fn apply_paint(&mut self, v: Vertex, c: Colour) -> Result<(), MoveError> {
        if self.status != GameStatus::Ongoing {
            return Err(MoveError::GameOver);
        }
        if self.turn != Turn::Painter || self.paints_left == 0 {
            return Err(MoveError::NotPaintersTurn);
        }
        self.check_vertex(v)?;
        if c < 1 || c > self.config.k {
            return Err(MoveError::ColourOutOfRange(c));
        }
        if self.is_coloured(v) {
            return Err(MoveError::AlreadyColoured(v));
        }
        if self.neighbourhood_has_colour(v, c) {
            return Err(MoveError::ColourClash { vertex: v, colour: c });
        }

        self.colour[(v - 1) as usize] = c;
        self.uncoloured -= 1;
        debug_assert!(!self.dead.contains(&v));
        let nbrs: Vec<Vertex> = self.neighbours(v).to_vec();
        for u in nbrs {
            self.insert_nbr_colour(u, c);
        }
        self.painter_moves += 1;
        self.paints_left -= 1;
        self.refresh_status();
        if self.status == GameStatus::Ongoing && self.paints_left == 0 {
            self.turn = Turn::Builder;
        }
        Ok(())
    }

    /// Builder adds a whole turn of edges. The move must carry exactly `b`
    /// edges unless fewer legal pairs remain, in which case it must carry all
    /// of them (the empty move is a pass, legal only with no pair left).
    pub fn apply_build(&mut self, edges: &[Edge]) -> Result<(), MoveError> {
        if self.status != GameStatus::Ongoing {
            return Err(MoveError::GameOver);
        }
        if self.turn != Turn::Builder {
            return Err(MoveError::NotBuildersTurn);
        }
        let b = self.config.b as usize;
        if edges.len() > b {
            return Err(MoveError::WrongEdgeCount {
                submitted: edges.len(),
                expected: b,
            });
        }

        let mut seen: HashSet<Edge> = HashSet::new();
        for &(u, v) in edges {
            self.check_vertex(u)?;
            self.check_vertex(v)?;
            if u == v {
                return Err(MoveError::SelfLoop(u));
            }
            let e = edge(u, v);
            if self.edge_set.contains(&e) {
                return Err(MoveError::EdgeExists(e.0, e.1));
            }
            if !seen.insert(e) {
                return Err(MoveError::DuplicateEdge(e.0, e.1));
            }
            if let (Some(a), Some(bc)) = (self.colour_of(u), self.colour_of(v)) {
                if a == bc {
                    return Err(MoveError::MonochromaticEdge(e.0, e.1, a));
                }
            }
        }

        // A short move claims the board is nearly saturated: every remaining
        // legal pair must be in it.
        if edges.len() < b {
            let all = self.enumerate_legal_pairs();
            let submitted: BTreeSet<Edge> = edges.iter().map(|&(u, v)| edge(u, v)).collect();
            let full: BTreeSet<Edge> = all.iter().copied().collect();
            if submitted != full {
                return Err(MoveError::WrongEdgeCount {
                    submitted: edges.len(),
                    expected: b.min(all.len()),
                });
            }
        }

        for &(u, v) in edges {
            let e = edge(u, v);
            self.edge_set.insert(e);
            self.edge_list.push(e);
            self.adj[(e.0 - 1) as usize].push(e.1);
            self.adj[(e.1 - 1) as usize].push(e.0);
            if let Some(c) = self.colour_of(e.0) {
                self.insert_nbr_colour(e.1, c);
            }
            if let Some(c) = self.colour_of(e.1) {
                self.insert_nbr_colour(e.0, c);
            }
        }

        self.builder_moves += 1;
        self.round += 1;
        self.refresh_status();
        if self.status == GameStatus::Ongoing {
            self.turn = Turn::Painter;
            self.paints_left = self.config.p.min(self.uncoloured);
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn force_ongoing_for_test(&mut self) {
        self.status = GameStatus::Ongoing;
        self.turn = Turn::Painter;
        self.paints_left = self.config.p.min(self.uncoloured);
    }
}
