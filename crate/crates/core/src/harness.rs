//! Batch experiment harness: seeds strategy pairings over a configuration
//! grid, runs the trials in parallel, audits transcripts, and reports the
//! closed-form bounds next to the empirical results.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{clique_schedule, BuilderConstants, BuilderKind};
use crate::game::{GameConfig, GameStatus};
use crate::painter::PainterKind;
use crate::rng::{derive_seed, RNG_ALGORITHM};
use crate::runner::{DriveError, GameRunner, Outcome};
use crate::transcript::{position_digest, replay_verify, CheckSet, Header, Transcript};
use crate::transcript::{TranscriptError, FORMAT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Retention {
    #[default]
    None,
    Failures,
    All,
}

/// One cell of the experiment grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub n: u32,
    pub k: u32,
    pub p: u32,
    pub b: u32,
    pub painter: PainterKind,
    pub builder: BuilderKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub ns: Vec<u32>,
    pub ks: Vec<u32>,
    #[serde(default = "one")]
    pub p: u32,
    #[serde(default = "one")]
    pub b: u32,
    pub painters: Vec<PainterKind>,
    pub builders: Vec<BuilderKind>,
    pub trials: u32,
    pub master_seed: u64,
    #[serde(default)]
    pub retention: Retention,
    #[serde(default)]
    pub audit: bool,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub constants: Option<BuilderConstants>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("experiment spec invalid: {0}")]
    InvalidSpec(String),
    #[error("trial failed in cell n={n} k={k} trial={trial}: {message}")]
    Trial {
        n: u32,
        k: u32,
        trial: u32,
        message: String,
    },
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
    #[error("failed writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialResult {
    pub trial: u32,
    pub outcome_status: GameStatus,
    pub rounds: u32,
    pub forfeit: bool,
    pub audit_ok: Option<bool>,
    pub digest: String,
    /// Agent or drive failure for this trial; failed trials count towards
    /// neither side and never abort the batch.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub cell: Cell,
    pub trials: u32,
    pub painter_wins: u32,
    pub builder_wins: u32,
    pub failures: u32,
    pub mean_rounds: f64,
    pub audits_run: u32,
    pub audits_passed: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub master_seed: u64,
    pub cells: Vec<CellSummary>,
}

impl BatchSummary {
    /// Aligned text table, one row per cell.
    pub fn table(&self) -> String {
        let mut out = String::from(
            "n\tk\tp\tb\tpainter\tbuilder\ttrials\tpainter_wins\tbuilder_wins\tmean_rounds\taudits_passed\n",
        );
        for c in &self.cells {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.2}\t{}/{}\n",
                c.cell.n,
                c.cell.k,
                c.cell.p,
                c.cell.b,
                c.cell.painter.name(),
                c.cell.builder.name(),
                c.trials,
                c.painter_wins,
                c.builder_wins,
                c.mean_rounds,
                c.audits_passed,
                c.audits_run,
            ));
        }
        out
    }
}

/// Per-trial seeds, derived from the master seed and the cell coordinates
/// only, so new cells or trial counts never perturb existing games.
pub fn trial_seeds(master: u64, cell: &Cell, trial: u32) -> (u64, u64) {
    let coords = [
        cell.n as u64,
        cell.k as u64,
        cell.p as u64,
        cell.b as u64,
        cell.painter as u64,
        cell.builder as u64,
        trial as u64,
    ];
    let painter_seed = derive_seed(master, &[&coords[..], &[1]].concat());
    let builder_seed = derive_seed(master, &[&coords[..], &[2]].concat());
    (painter_seed, builder_seed)
}

/// Run one seeded game and build its transcript.
pub fn run_one_game(
    cell: &Cell,
    painter_seed: u64,
    builder_seed: u64,
    constants: &BuilderConstants,
) -> Result<(Outcome, Transcript), DriveError> {
    let config = GameConfig::new(cell.n, cell.k, cell.p, cell.b)
        .map_err(DriveError::Config)?;
    let mut painter = cell.painter.instantiate(painter_seed);
    let mut builder = cell.builder.instantiate(builder_seed, constants);
    let runner = GameRunner::new(config, painter.as_mut(), builder.as_mut())?;
    let (outcome, events) = runner.run()?;

    // Replaying the events reproduces the digest recorded here.
    let mut replay = crate::game::GameState::new(config).expect("valid config");
    for event in &events {
        if let crate::events::Event::Move { action, .. } = event {
            match action {
                crate::events::Action::Paint { vertex, colour } => {
                    replay.apply_paint(*vertex, *colour).expect("replayable");
                }
                crate::events::Action::Build { edges } => {
                    replay.apply_build(edges).expect("replayable");
                }
            }
        }
    }
    let digest = position_digest(&replay);
    let header = Header {
        version: FORMAT_VERSION.to_string(),
        config,
        painter: cell.painter.name().to_string(),
        painter_seed,
        builder: cell.builder.name().to_string(),
        builder_seed,
        rng: RNG_ALGORITHM.to_string(),
        constants: constants.clone(),
    };
    Ok((outcome, Transcript::new(header, events, &outcome, digest)))
}

/// All grid cells of a spec, in deterministic order.
pub fn spec_cells(spec: &ExperimentSpec) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &n in &spec.ns {
        for &k in &spec.ks {
            for &painter in &spec.painters {
                for &builder in &spec.builders {
                    cells.push(Cell {
                        n,
                        k,
                        p: spec.p,
                        b: spec.b,
                        painter,
                        builder,
                    });
                }
            }
        }
    }
    cells
}

pub fn simulate_batch(spec: &ExperimentSpec) -> Result<BatchSummary, HarnessError> {
    if spec.trials < 1 {
        return Err(HarnessError::InvalidSpec("trials must be at least 1".into()));
    }
    if spec.ns.is_empty() || spec.ks.is_empty() {
        return Err(HarnessError::InvalidSpec("empty n or k range".into()));
    }
    if spec.painters.is_empty() || spec.builders.is_empty() {
        return Err(HarnessError::InvalidSpec("no agents selected".into()));
    }
    let constants = spec.constants.clone().unwrap_or_default();
    let cells = spec_cells(spec);

    let mut summaries = Vec::with_capacity(cells.len());
    for cell in cells {
        // Bipartiteness is a guarantee of the logarithmic Builder in the
        // unbiased game (with several edges per turn the truncation rule can
        // force a saturated, odd-cycled board); other runs get the universal
        // checks.
        let checks = if cell.builder == BuilderKind::Logarithmic && cell.b == 1 {
            CheckSet::all()
        } else {
            CheckSet::default()
        };
        let results: Result<Vec<(TrialResult, Option<Transcript>)>, HarnessError> = (0
            ..spec.trials)
            .into_par_iter()
            .map(|trial| {
                let (ps, bs) = trial_seeds(spec.master_seed, &cell, trial);
                // Agent failures are recorded against the trial, never fatal
                // to the batch.
                let (outcome, transcript) = match run_one_game(&cell, ps, bs, &constants) {
                    Ok(pair) => pair,
                    Err(e) => {
                        return Ok((
                            TrialResult {
                                trial,
                                outcome_status: GameStatus::Ongoing,
                                rounds: 0,
                                forfeit: false,
                                audit_ok: None,
                                digest: String::new(),
                                error: Some(e.to_string()),
                            },
                            None,
                        ));
                    }
                };
                let audit_ok = if spec.audit {
                    let report = replay_verify(&transcript.records(), &checks)?;
                    Some(report.ok())
                } else {
                    None
                };
                let keep = match spec.retention {
                    Retention::All => true,
                    Retention::Failures => {
                        outcome.status == GameStatus::BuilderWin || audit_ok == Some(false)
                    }
                    Retention::None => false,
                };
                let result = TrialResult {
                    trial,
                    outcome_status: outcome.status,
                    rounds: outcome.rounds,
                    forfeit: outcome.forfeit,
                    audit_ok,
                    digest: transcript.terminal.digest.clone(),
                    error: None,
                };
                Ok((result, keep.then_some(transcript)))
            })
            .collect();
        let results = results?;

        let mut painter_wins = 0u32;
        let mut builder_wins = 0u32;
        let mut failures = 0u32;
        let mut rounds_total = 0u64;
        let mut audits_run = 0u32;
        let mut audits_passed = 0u32;
        for (tr, transcript) in &results {
            match tr.outcome_status {
                GameStatus::PainterWin => painter_wins += 1,
                GameStatus::BuilderWin => builder_wins += 1,
                GameStatus::Ongoing => failures += 1,
            }
            rounds_total += tr.rounds as u64;
            if let Some(ok) = tr.audit_ok {
                audits_run += 1;
                if ok {
                    audits_passed += 1;
                }
            }
            if let (Some(t), Some(dir)) = (transcript.as_ref(), spec.out_dir.as_ref()) {
                std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
                let name = format!(
                    "{}_vs_{}_n{}_k{}_p{}_b{}_t{}.jsonl",
                    cell.painter.name(),
                    cell.builder.name(),
                    cell.n,
                    cell.k,
                    cell.p,
                    cell.b,
                    tr.trial
                );
                t.write_to_file(&dir.join(name))?;
            }
        }
        summaries.push(CellSummary {
            cell,
            trials: spec.trials,
            painter_wins,
            builder_wins,
            failures,
            mean_rounds: rounds_total as f64 / spec.trials as f64,
            audits_run,
            audits_passed,
        });
    }
    Ok(BatchSummary {
        master_seed: spec.master_seed,
        cells: summaries,
    })
}

/// The closed-form bounds for a board, with validity flags.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub n: u64,
    pub b: u64,
    /// 0.01 log2 n; proven only for n > 10^8.
    pub unbiased_lower: f64,
    pub unbiased_lower_proven: bool,
    /// log2 n + 1, valid for every n >= 2.
    pub unbiased_upper: f64,
    /// (b/2) ln(n/(2b) + 1); needs b >= 2.
    pub biased_lower: Option<f64>,
    /// min(ceil(2 b ln n), n).
    pub biased_upper: u64,
    /// t + 1 from the clique recurrence: a constructive lower bound.
    pub clique_lower: u64,
    pub regime: String,
}

pub fn bounds_report(n: u64, b: u64) -> BoundsReport {
    let nf = n as f64;
    let bf = b as f64;
    let biased_lower = (b >= 2).then(|| bf / 2.0 * (nf / (2.0 * bf) + 1.0).ln());
    let biased_upper = ((2.0 * bf * nf.ln()).ceil() as u64).min(n);
    let schedule = clique_schedule(n, b);
    let regime = if b == 1 {
        "unbiased: k_min grows as Theta(log n)".to_string()
    } else if (b as f64) <= nf.powf(0.9) {
        "biased, b <= n^0.9: k_min grows as Theta(b ln n)".to_string()
    } else if 10 * b >= n {
        "biased, b = Theta(n): k_min grows as Theta(n)".to_string()
    } else {
        "biased, between the settled regimes: order of k_min open".to_string()
    };
    BoundsReport {
        n,
        b,
        unbiased_lower: 0.01 * nf.log2(),
        unbiased_lower_proven: n > 100_000_000,
        unbiased_upper: nf.log2() + 1.0,
        biased_lower,
        biased_upper,
        clique_lower: schedule.t as u64 + 1,
        regime,
    }
}

impl BoundsReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.push(format!("board n = {}, builder bias b = {}", self.n, self.b));
        out.push(format!(
            "unbiased lower bound  0.01 log2 n        = {:.4}{}",
            self.unbiased_lower,
            if self.unbiased_lower_proven {
                ""
            } else {
                "   [outside proven range: needs n > 10^8]"
            }
        ));
        out.push(format!(
            "unbiased upper bound  log2 n + 1         = {:.4}",
            self.unbiased_upper
        ));
        match self.biased_lower {
            Some(v) => out.push(format!(
                "biased lower bound    (b/2) ln(n/2b + 1) = {v:.4}"
            )),
            None => out.push("biased lower bound    requires b >= 2".to_string()),
        }
        out.push(format!(
            "biased upper bound    min(ceil(2b ln n), n) = {}",
            self.biased_upper
        ));
        out.push(format!(
            "clique construction   guarantees k_min > {}",
            self.clique_lower.saturating_sub(1)
        ));
        out.push(format!("regime: {}", self.regime));
        out
    }
}
