//! Transcript determinism and file handling.

use pbgame_core::builder::{BuilderConstants, BuilderKind};
use pbgame_core::harness::{run_one_game, Cell};
use pbgame_core::painter::PainterKind;
use pbgame_core::transcript::{read_file, replay_verify, CheckSet, TranscriptError};

fn cell(n: u32, k: u32) -> Cell {
    Cell {
        n,
        k,
        p: 1,
        b: 1,
        painter: PainterKind::RandomGreedy,
        builder: BuilderKind::Random,
    }
}

#[test]
fn same_seed_same_bytes() {
    let constants = BuilderConstants::default();
    let (_, t1) = run_one_game(&cell(12, 3), 42, 43, &constants).unwrap();
    let (_, t2) = run_one_game(&cell(12, 3), 42, 43, &constants).unwrap();
    assert_eq!(t1.to_string(), t2.to_string());
    let (_, t3) = run_one_game(&cell(12, 3), 42, 44, &constants).unwrap();
    assert_ne!(t1.to_string(), t3.to_string());
}

#[test]
fn file_round_trip_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.jsonl");
    let constants = BuilderConstants::default();
    let (_, transcript) = run_one_game(&cell(10, 2), 7, 8, &constants).unwrap();
    transcript.write_to_file(&path).unwrap();
    let records = read_file(&path).unwrap();
    assert_eq!(records, transcript.records());
    let report = replay_verify(&records, &CheckSet::default()).unwrap();
    assert!(report.ok(), "{:?}", report.lines());
}

#[test]
fn unwritable_path_is_a_structured_error() {
    let constants = BuilderConstants::default();
    let (_, transcript) = run_one_game(&cell(6, 2), 1, 2, &constants).unwrap();
    let err = transcript
        .write_to_file(std::path::Path::new("/nonexistent-dir/game.jsonl"))
        .unwrap_err();
    match err {
        TranscriptError::Write { path, .. } => {
            assert!(path.contains("nonexistent-dir"));
        }
        other => panic!("expected a write error, got {other}"),
    }
}

#[test]
fn garbage_line_reports_its_number() {
    let text = "{\"t\":\"header\",\"version\":\"1.0\"\nnot json\n";
    match pbgame_core::transcript::parse_records(text.as_bytes()) {
        Err(TranscriptError::Malformed { line: 1, .. }) => {}
        other => panic!("expected malformed at line 1, got {other:?}"),
    }
}

#[test]
fn summary_counts_match_retained_terminal_records() {
    let dir = tempfile::tempdir().unwrap();
    let spec = pbgame_core::harness::ExperimentSpec {
        ns: vec![8],
        ks: vec![2],
        p: 1,
        b: 1,
        painters: vec![PainterKind::FirstFit],
        builders: vec![BuilderKind::Random],
        trials: 20,
        master_seed: 31,
        retention: pbgame_core::harness::Retention::All,
        audit: false,
        out_dir: Some(dir.path().to_path_buf()),
        constants: None,
    };
    let summary = pbgame_core::harness::simulate_batch(&spec).unwrap();
    let cell = &summary.cells[0];
    let mut painter_wins = 0u32;
    let mut builder_wins = 0u32;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|x| x != "jsonl") {
            continue;
        }
        let records = read_file(&path).unwrap();
        match records.last() {
            Some(pbgame_core::transcript::Record::End(t)) => match t.status {
                pbgame_core::game::GameStatus::PainterWin => painter_wins += 1,
                pbgame_core::game::GameStatus::BuilderWin => builder_wins += 1,
                pbgame_core::game::GameStatus::Ongoing => panic!("unfinished transcript"),
            },
            other => panic!("no terminal record: {other:?}"),
        }
    }
    assert_eq!(painter_wins, cell.painter_wins);
    assert_eq!(builder_wins, cell.builder_wins);
}

#[test]
fn check_set_parsing() {
    let all = CheckSet::parse("all").unwrap();
    assert!(all.bipartite && all.room && all.digest);
    let some = CheckSet::parse("proper,digest").unwrap();
    assert!(some.proper_colouring && some.digest);
    assert!(!some.bipartite && !some.room);
    assert!(CheckSet::parse("nonsense").is_err());
}
