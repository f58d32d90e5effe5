//! Bit-exact game recording, deterministic replay, and post-hoc invariant
//! auditing.
//!
//! A transcript is newline-delimited JSON: a header line, one line per move
//! or phase annotation, and a terminal line carrying the outcome and a
//! digest of the final position. Identical seeds and configuration produce
//! byte-identical files.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{verify_room, BuilderConstants};
use crate::builder::{verify_escalation, EscalationState};
use crate::events::{Action, Actor, Event, Mark};
use crate::game::{GameConfig, GameState, GameStatus, MoveError};
use crate::invariants;
use crate::runner::Outcome;

/// Bumped on breaking format changes; readers reject other major versions.
pub const FORMAT_VERSION: &str = "1.0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub version: String,
    pub config: GameConfig,
    pub painter: String,
    pub painter_seed: u64,
    pub builder: String,
    pub builder_seed: u64,
    pub rng: String,
    pub constants: BuilderConstants,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub status: GameStatus,
    pub rounds: u32,
    pub painter_moves: u32,
    pub builder_moves: u32,
    pub forfeit: bool,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum Record {
    Header(Header),
    Move { actor: Actor, action: Action },
    Mark(Mark),
    End(Terminal),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub header: Header,
    pub events: Vec<Event>,
    pub terminal: Terminal,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("failed writing transcript to {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("failed reading transcript from {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported format version {found}, reader supports major {major}")]
    UnsupportedVersion { found: String, major: String },
    #[error("transcript has no header record")]
    MissingHeader,
    #[error("transcript has no terminal record")]
    MissingTerminal,
    #[error("record {index}: illegal move during replay: {source}")]
    IllegalMove { index: usize, source: MoveError },
    #[error("record {index}: {message}")]
    BadRecord { index: usize, message: String },
}

/// FNV-1a over the final colouring and the sorted edge set.
pub fn position_digest(state: &GameState) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for byte in x.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(state.n() as u64);
    eat(state.k() as u64);
    for v in state.vertices() {
        eat(state.colour_of(v).unwrap_or(0) as u64);
    }
    let mut edges = state.edges().to_vec();
    edges.sort_unstable();
    for (u, v) in edges {
        eat(u as u64);
        eat(v as u64);
    }
    let mut out = String::with_capacity(16);
    write!(out, "{hash:016x}").expect("hex format");
    out
}

impl Transcript {
    pub fn new(header: Header, events: Vec<Event>, outcome: &Outcome, digest: String) -> Self {
        Transcript {
            header,
            events,
            terminal: Terminal {
                status: outcome.status,
                rounds: outcome.rounds,
                painter_moves: outcome.painter_moves,
                builder_moves: outcome.builder_moves,
                forfeit: outcome.forfeit,
                digest,
            },
        }
    }

    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::with_capacity(self.events.len() + 2);
        out.push(Record::Header(self.header.clone()));
        for e in &self.events {
            out.push(match e {
                Event::Move { actor, action } => Record::Move {
                    actor: *actor,
                    action: action.clone(),
                },
                Event::Mark(m) => Record::Mark(m.clone()),
            });
        }
        out.push(Record::End(self.terminal.clone()));
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(self.to_string().as_bytes())
    }

    pub fn write_to_file(&self, path: &Path) -> Result<(), TranscriptError> {
        std::fs::write(path, self.to_string()).map_err(|source| TranscriptError::Write {
            path: path.display().to_string(),
            source,
        })
    }
}

impl std::fmt::Display for Transcript {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in self.records() {
            let line = serde_json::to_string(&r).map_err(|_| std::fmt::Error)?;
            f.write_str(&line)?;
            f.write_str("\n")?;
        }
        Ok(())
    }
}

/// Parse a transcript from newline-delimited records.
pub fn parse_records(reader: impl BufRead) -> Result<Vec<Record>, TranscriptError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| TranscriptError::Read {
            path: "<stream>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| TranscriptError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_file(path: &Path) -> Result<Vec<Record>, TranscriptError> {
    let file = std::fs::File::open(path).map_err(|source| TranscriptError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_records(io::BufReader::new(file))
}

/// Which audit checks to run during replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckSet {
    /// Recompute proper-colouring from scratch as moves apply.
    pub proper_colouring: bool,
    /// 2-colourability; per move up to `bipartite_per_move_max_n` vertices,
    /// at marks and the end beyond that.
    pub bipartite: bool,
    /// Waiting-room certificates at their marks.
    pub room: bool,
    /// Escalation-level postconditions at their marks.
    pub escalation: bool,
    /// Clique certificates at their marks.
    pub clique: bool,
    /// Terminal digest matches the replayed position.
    pub digest: bool,
    pub bipartite_per_move_max_n: u32,
}

impl Default for CheckSet {
    fn default() -> Self {
        CheckSet {
            proper_colouring: true,
            bipartite: false,
            room: true,
            escalation: true,
            clique: true,
            digest: true,
            bipartite_per_move_max_n: 2000,
        }
    }
}

impl CheckSet {
    pub fn all() -> Self {
        CheckSet {
            bipartite: true,
            ..CheckSet::default()
        }
    }

    /// Parse a comma-separated list: `all`, or any of
    /// `proper,bipartite,room,escalation,clique,digest`.
    pub fn parse(spec: &str) -> Result<Self, String> {
        if spec == "all" {
            return Ok(CheckSet::all());
        }
        let mut set = CheckSet {
            proper_colouring: false,
            bipartite: false,
            room: false,
            escalation: false,
            clique: false,
            digest: false,
            bipartite_per_move_max_n: 2000,
        };
        for item in spec.split(',') {
            match item.trim() {
                "proper" => set.proper_colouring = true,
                "bipartite" => set.bipartite = true,
                "room" => set.room = true,
                "escalation" => set.escalation = true,
                "clique" => set.clique = true,
                "digest" => set.digest = true,
                other => return Err(format!("unknown check '{other}'")),
            }
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Index of the first offending record, when failed.
    pub first_failure: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<CheckOutcome>,
    pub records: usize,
    pub marks: usize,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                if c.passed {
                    format!("PASS {}", c.name)
                } else {
                    format!(
                        "FAIL {} at record {}: {}",
                        c.name,
                        c.first_failure.map(|i| i as i64).unwrap_or(-1),
                        c.detail
                    )
                }
            })
            .collect()
    }
}

struct CheckState {
    name: &'static str,
    passed: bool,
    first_failure: Option<usize>,
    detail: String,
    ran: bool,
}

impl CheckState {
    fn new(name: &'static str) -> Self {
        CheckState {
            name,
            passed: true,
            first_failure: None,
            detail: String::new(),
            ran: false,
        }
    }

    fn record(&mut self, index: usize, result: Result<(), String>) {
        self.ran = true;
        if self.passed {
            if let Err(msg) = result {
                self.passed = false;
                self.first_failure = Some(index);
                self.detail = msg;
            }
        }
    }
}

/// Replay a parsed transcript move by move, enforcing legality through the
/// engine and evaluating the enabled checks after every move or at phase
/// marks. Structural checks recompute from the adjacency structure, not the
/// engine's incremental bookkeeping.
pub fn replay_verify(records: &[Record], checks: &CheckSet) -> Result<AuditReport, TranscriptError> {
    let header = match records.first() {
        Some(Record::Header(h)) => h.clone(),
        _ => return Err(TranscriptError::MissingHeader),
    };
    let major = FORMAT_VERSION.split('.').next().unwrap_or("1");
    if header.version.split('.').next() != Some(major) {
        return Err(TranscriptError::UnsupportedVersion {
            found: header.version.clone(),
            major: major.to_string(),
        });
    }

    let mut state =
        GameState::new(header.config).map_err(|e| TranscriptError::Malformed {
            line: 1,
            message: e.to_string(),
        })?;
    let constants = header.constants.clone();

    let mut proper = CheckState::new("proper-colouring");
    let mut bipartite = CheckState::new("bipartite");
    let mut room_check = CheckState::new("waiting-room-certificate");
    let mut escalation_check = CheckState::new("escalation-certificates");
    let mut clique_check = CheckState::new("clique-certificates");
    let mut digest_check = CheckState::new("terminal-digest");
    let mut legality = CheckState::new("move-legality");
    legality.ran = true;

    let per_move_bipartite =
        checks.bipartite && header.config.n <= checks.bipartite_per_move_max_n;
    let mut current_room: Option<(Vec<u32>, Vec<u32>, u32)> = None;
    let mut builder_moves_seen = 0u32;
    let mut marks = 0usize;
    let mut terminal: Option<(usize, Terminal)> = None;

    for (index, record) in records.iter().enumerate().skip(1) {
        match record {
            Record::Header(_) => {
                return Err(TranscriptError::BadRecord {
                    index,
                    message: "second header record".into(),
                })
            }
            Record::Move { actor, action } => {
                if terminal.is_some() {
                    return Err(TranscriptError::BadRecord {
                        index,
                        message: "move after terminal record".into(),
                    });
                }
                match (actor, action) {
                    (Actor::Painter, Action::Paint { vertex, colour }) => {
                        state
                            .apply_paint(*vertex, *colour)
                            .map_err(|source| TranscriptError::IllegalMove { index, source })?;
                    }
                    (Actor::Builder, Action::Build { edges }) => {
                        state
                            .apply_build(edges)
                            .map_err(|source| TranscriptError::IllegalMove { index, source })?;
                        builder_moves_seen += 1;
                    }
                    _ => {
                        return Err(TranscriptError::BadRecord {
                            index,
                            message: "actor does not match action".into(),
                        })
                    }
                }
                if checks.proper_colouring {
                    proper.record(
                        index,
                        if invariants::is_properly_coloured(&state) {
                            Ok(())
                        } else {
                            Err("monochromatic edge".into())
                        },
                    );
                }
                if per_move_bipartite {
                    bipartite.record(
                        index,
                        if invariants::is_bipartite(&state) {
                            Ok(())
                        } else {
                            Err("odd cycle in the game graph".into())
                        },
                    );
                }
            }
            Record::Mark(mark) => {
                marks += 1;
                if checks.bipartite && !per_move_bipartite {
                    bipartite.record(
                        index,
                        if invariants::is_bipartite(&state) {
                            Ok(())
                        } else {
                            Err("odd cycle in the game graph".into())
                        },
                    );
                }
                match mark {
                    Mark::WaitingRoom {
                        a,
                        b,
                        colour,
                        builder_moves,
                    } => {
                        current_room = Some((a.clone(), b.clone(), *colour));
                        if checks.room {
                            let mut result = verify_room(&state, a, b, *colour, &constants);
                            if result.is_ok() && !invariants::is_disjoint_paths_max_two(&state) {
                                result =
                                    Err("graph is not disjoint paths of length <= 2".into());
                            }
                            if result.is_ok() && *builder_moves != builder_moves_seen {
                                result = Err(format!(
                                    "mark claims {builder_moves} builder moves, replay saw {builder_moves_seen}"
                                ));
                            }
                            if result.is_ok()
                                && !constants
                                    .round_cap
                                    .le_mul(builder_moves_seen as u64, state.n() as u64)
                            {
                                result = Err(format!(
                                    "room took {builder_moves_seen} builder moves, over the cap"
                                ));
                            }
                            room_check.record(index, result);
                        }
                    }
                    Mark::Escalation {
                        level,
                        members,
                        prev_count,
                    } => {
                        if checks.escalation {
                            let (ra, rb) = match &current_room {
                                Some((a, b, _)) => (a.clone(), b.clone()),
                                None => (Vec::new(), Vec::new()),
                            };
                            let esc = EscalationState {
                                level: *level,
                                members: members.clone(),
                                prev_count: *prev_count,
                            };
                            escalation_check.record(
                                index,
                                verify_escalation(&state, &ra, &rb, &esc, &constants),
                            );
                        }
                    }
                    Mark::CliqueLevel {
                        apexes,
                        pool,
                        floor,
                    } => {
                        if checks.clique {
                            clique_check
                                .record(index, verify_clique_level(&state, apexes, pool, *floor));
                        }
                    }
                    Mark::CliqueFinal { clique } => {
                        if checks.clique {
                            clique_check.record(index, verify_clique(&state, clique));
                        }
                    }
                }
            }
            Record::End(t) => {
                if terminal.is_some() {
                    return Err(TranscriptError::BadRecord {
                        index,
                        message: "second terminal record".into(),
                    });
                }
                terminal = Some((index, t.clone()));
            }
        }
    }

    let (t_index, t) = terminal.ok_or(TranscriptError::MissingTerminal)?;
    if checks.digest {
        let replayed = position_digest(&state);
        digest_check.record(
            t_index,
            if replayed == t.digest {
                Ok(())
            } else {
                Err(format!("replayed digest {replayed}, recorded {}", t.digest))
            },
        );
        let status_consistent = t.status == state.status()
            || (t.forfeit
                && t.status == GameStatus::BuilderWin
                && state.status() == GameStatus::Ongoing);
        digest_check.record(
            t_index,
            if status_consistent {
                Ok(())
            } else {
                Err(format!(
                    "terminal status {:?} vs replayed {:?}",
                    t.status,
                    state.status()
                ))
            },
        );
    }
    if checks.proper_colouring {
        proper.record(
            t_index,
            if invariants::is_properly_coloured(&state) {
                Ok(())
            } else {
                Err("monochromatic edge in final position".into())
            },
        );
    }
    if checks.bipartite {
        bipartite.record(
            t_index,
            if invariants::is_bipartite(&state) {
                Ok(())
            } else {
                Err("odd cycle in final position".into())
            },
        );
    }

    let all = [
        legality,
        proper,
        bipartite,
        room_check,
        escalation_check,
        clique_check,
        digest_check,
    ];
    Ok(AuditReport {
        checks: all
            .into_iter()
            .filter(|c| c.ran)
            .map(|c| CheckOutcome {
                name: c.name.to_string(),
                passed: c.passed,
                first_failure: c.first_failure,
                detail: c.detail,
            })
            .collect(),
        records: records.len(),
        marks,
    })
}

fn verify_clique(state: &GameState, clique: &[u32]) -> Result<(), String> {
    for i in 0..clique.len() {
        for j in (i + 1)..clique.len() {
            if !state.is_edge(clique[i], clique[j]) {
                return Err(format!(
                    "clique pair ({}, {}) is not an edge",
                    clique[i], clique[j]
                ));
            }
        }
    }
    Ok(())
}

fn verify_clique_level(
    state: &GameState,
    apexes: &[u32],
    pool: &[u32],
    floor: u64,
) -> Result<(), String> {
    verify_clique(state, apexes)?;
    if (pool.len() as u64) < floor {
        return Err(format!("pool has {} vertices, floor is {floor}", pool.len()));
    }
    for &v in pool {
        if state.is_coloured(v) {
            return Err(format!("pool vertex {v} is coloured"));
        }
        for &a in apexes {
            if !state.is_edge(a, v) {
                return Err(format!("pool vertex {v} not joined to apex {a}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::Event;

    fn tiny_transcript() -> Transcript {
        let config = GameConfig::unbiased(3, 2).unwrap();
        let mut state = GameState::new(config).unwrap();
        let mut events = Vec::new();
        for (v, c, e) in [(1u32, 1u32, (1u32, 2u32)), (2, 2, (2, 3))] {
            state.apply_paint(v, c).unwrap();
            events.push(Event::Move {
                actor: Actor::Painter,
                action: Action::Paint {
                    vertex: v,
                    colour: c,
                },
            });
            state.apply_build(&[e]).unwrap();
            events.push(Event::Move {
                actor: Actor::Builder,
                action: Action::Build { edges: vec![e] },
            });
        }
        state.apply_paint(3, 1).unwrap();
        events.push(Event::Move {
            actor: Actor::Painter,
            action: Action::Paint {
                vertex: 3,
                colour: 1,
            },
        });
        let header = Header {
            version: FORMAT_VERSION.to_string(),
            config,
            painter: "scripted".into(),
            painter_seed: 0,
            builder: "scripted".into(),
            builder_seed: 0,
            rng: crate::rng::RNG_ALGORITHM.into(),
            constants: BuilderConstants::default(),
        };
        let outcome = Outcome {
            status: state.status(),
            rounds: state.round(),
            painter_moves: state.painter_moves(),
            builder_moves: state.builder_moves(),
            forfeit: false,
        };
        let digest = position_digest(&state);
        Transcript::new(header, events, &outcome, digest)
    }

    #[test]
    fn record_count_is_one_per_event_plus_ends() {
        let t = tiny_transcript();
        // 3 paints + 2 builds + header + terminal.
        assert_eq!(t.records().len(), 7);
    }

    #[test]
    fn round_trip_preserves_records() {
        let t = tiny_transcript();
        let text = t.to_string();
        let parsed = parse_records(text.as_bytes()).unwrap();
        assert_eq!(parsed, t.records());
    }

    #[test]
    fn replay_passes_and_digest_matches() {
        let t = tiny_transcript();
        let report = replay_verify(&t.records(), &CheckSet::all()).unwrap();
        assert!(report.ok(), "{:?}", report.lines());
    }

    #[test]
    fn corrupted_record_is_rejected_with_its_index() {
        let t = tiny_transcript();
        let mut records = t.records();
        // Repaint an already coloured vertex.
        records[3] = Record::Move {
            actor: Actor::Painter,
            action: Action::Paint {
                vertex: 1,
                colour: 2,
            },
        };
        match replay_verify(&records, &CheckSet::all()) {
            Err(TranscriptError::IllegalMove { index: 3, .. }) => {}
            other => panic!("expected illegal move at 3, got {other:?}"),
        }
    }

    #[test]
    fn unknown_major_version_is_rejected() {
        let t = tiny_transcript();
        let mut records = t.records();
        if let Record::Header(h) = &mut records[0] {
            h.version = "2.0".into();
        }
        assert!(matches!(
            replay_verify(&records, &CheckSet::all()),
            Err(TranscriptError::UnsupportedVersion { .. })
        ));
    }

    #[test]
    fn tampered_digest_fails_the_audit() {
        let t = tiny_transcript();
        let mut records = t.records();
        let last = records.len() - 1;
        if let Record::End(term) = &mut records[last] {
            term.digest = "0000000000000000".into();
        }
        let report = replay_verify(&records, &CheckSet::all()).unwrap();
        assert!(!report.ok());
    }
}
