//! Property suite: agent legality against unstructured opponents, engine
//! monotonicity, the incremental dead-vertex bookkeeping against its
//! recomputed oracle, transcript round-trips, and the per-vertex degree
//! bound of the greedy-random Painter.

mod common;

use common::RandomLegalPainter;
use proptest::prelude::*;

use pbgame_core::builder::{BuilderConstants, BuilderKind};
use pbgame_core::game::{GameConfig, GameState, GameStatus};
use pbgame_core::harness::{run_one_game, Cell};
use pbgame_core::invariants;
use pbgame_core::painter::{PainterKind, PainterTurn};
use pbgame_core::stats::{within_binomial_bound, FOUR_SIGMA_ONE_SIDED};
use pbgame_core::transcript::{parse_records, replay_verify, CheckSet};

fn config_strategy() -> impl Strategy<Value = (u32, u32, u32, u32)> {
    (2u32..24, 1u32..6, 1u32..3, 1u32..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every Painter agent emits only engine-legal turns against the random
    /// Builder, for any configuration and seed.
    #[test]
    fn painter_agents_stay_legal(
        (n, k, p, b) in config_strategy(),
        painter in prop::sample::select(PainterKind::ALL.to_vec()),
        seed in any::<u64>(),
    ) {
        let cell = Cell { n, k, p, b, painter, builder: BuilderKind::Random };
        let constants = BuilderConstants::default();
        // run_one_game propagates any engine rejection as an error.
        let result = run_one_game(&cell, seed, seed ^ 0xabcd, &constants);
        prop_assert!(result.is_ok(), "{:?}", result.err().map(|e| e.to_string()));
    }

    /// Every Builder agent emits only engine-legal turns against a Painter
    /// that scatters colours at random.
    #[test]
    fn builder_agents_stay_legal(
        (n, k, p, b) in config_strategy(),
        builder in prop::sample::select(BuilderKind::ALL.to_vec()),
        seed in any::<u64>(),
    ) {
        let config = GameConfig::new(n, k, p, b).unwrap();
        let mut painter = RandomLegalPainter::new(seed);
        let mut agent = builder.instantiate(seed ^ 0x5a5a, &BuilderConstants::default());
        let runner = pbgame_core::runner::GameRunner::new(config, &mut painter, agent.as_mut());
        let result = runner.unwrap().run();
        prop_assert!(result.is_ok(), "{:?}", result.err().map(|e| e.to_string()));
    }

    /// Along any game: the colouring stays proper, coloured vertices and
    /// edges only accumulate, and the incremental dead set always equals the
    /// recomputed one.
    #[test]
    fn engine_invariants_along_random_games(
        (n, k, p, b) in config_strategy(),
        seed in any::<u64>(),
    ) {
        let config = GameConfig::new(n, k, p, b).unwrap();
        let mut painter = RandomLegalPainter::new(seed);
        let mut builder = BuilderKind::Random.instantiate(seed ^ 0x77, &BuilderConstants::default());
        let mut driver = pbgame_core::runner::BuilderDriver::new(config, &mut painter).unwrap();
        let mut coloured_before = driver.state().coloured_count();
        let mut edges_before = driver.state().edges().len();
        while !driver.over() {
            let edges = builder.build_turn(driver.state());
            driver.play(&edges).unwrap();
            let state = driver.state();
            prop_assert!(invariants::is_properly_coloured(state));
            prop_assert!(state.coloured_count() >= coloured_before);
            prop_assert!(state.edges().len() >= edges_before);
            coloured_before = state.coloured_count();
            edges_before = state.edges().len();
            prop_assert_eq!(state.dead_vertices(), state.recompute_dead_vertices());
        }
    }

    /// Record -> parse -> replay: the records round-trip and the audit
    /// accepts every engine-produced transcript.
    #[test]
    fn transcripts_round_trip_and_audit(
        (n, k, p, b) in config_strategy(),
        painter in prop::sample::select(PainterKind::ALL.to_vec()),
        builder in prop::sample::select(BuilderKind::ALL.to_vec()),
        seed in any::<u64>(),
    ) {
        let cell = Cell { n, k, p, b, painter, builder };
        let constants = BuilderConstants::default();
        let (_, transcript) = run_one_game(&cell, seed, seed ^ 1, &constants).unwrap();
        let text = transcript.to_string();
        let parsed = parse_records(text.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &transcript.records());
        // Bipartiteness is guaranteed for the logarithmic Builder in the
        // unbiased game only.
        let checks = if builder == BuilderKind::Logarithmic && b == 1 {
            CheckSet::all()
        } else {
            CheckSet::default()
        };
        let report = replay_verify(&parsed, &checks).unwrap();
        prop_assert!(report.ok(), "{:?}", report.lines());
    }
}

/// Greedy-random Painter, per-vertex bound: the event "vertex v reaches
/// degree floor(log2 n) + 1 while uncoloured" occurs with probability at
/// most 2^-(floor(log2 n) + 1) against any Builder. Checked empirically at
/// a four-sigma exact-binomial gate.
#[test]
fn random_greedy_degree_event_is_rare() {
    let n: u32 = 16;
    let k = 5u32; // floor(log2 16) + 1
    let threshold = n.ilog2() + 1;
    let trials = 3000u64;
    let mut event_counts = vec![0u64; n as usize + 1];

    for trial in 0..trials {
        let cell = Cell {
            n,
            k,
            p: 1,
            b: 1,
            painter: PainterKind::RandomGreedy,
            builder: BuilderKind::Random,
        };
        let (_, transcript) =
            run_one_game(&cell, trial * 2 + 1, trial * 2 + 2, &BuilderConstants::default())
                .unwrap();
        // Replay the move list, tracking degree-while-uncoloured.
        let mut state = GameState::new(GameConfig::new(n, k, 1, 1).unwrap()).unwrap();
        let mut fired = vec![false; n as usize + 1];
        for event in &transcript.events {
            if let pbgame_core::events::Event::Move { action, .. } = event {
                match action {
                    pbgame_core::events::Action::Paint { vertex, colour } => {
                        state.apply_paint(*vertex, *colour).unwrap();
                    }
                    pbgame_core::events::Action::Build { edges } => {
                        state.apply_build(edges).unwrap();
                    }
                }
            }
            for v in state.vertices() {
                if !state.is_coloured(v) && state.degree(v) as u32 >= threshold {
                    fired[v as usize] = true;
                }
            }
        }
        for (count, hit) in event_counts.iter_mut().zip(fired.iter()) {
            if *hit {
                *count += 1;
            }
        }
    }

    let per_vertex_bound = 0.5f64.powi(threshold as i32);
    for (v, &count) in event_counts.iter().enumerate().skip(1) {
        assert!(
            within_binomial_bound(trials, per_vertex_bound, count, FOUR_SIGMA_ONE_SIDED),
            "vertex {v} hit the degree event {count} times in {trials} trials (bound {per_vertex_bound})"
        );
    }
}

/// Two-for-one: after every Painter turn, every endpoint of every edge is
/// coloured, so no vertex ever sees both colour classes.
#[test]
fn two_for_one_keeps_non_isolated_vertices_coloured() {
    for seed in 0..20u64 {
        let config = GameConfig::new(40, 2, 2, 1).unwrap();
        let mut painter = PainterKind::TwoForOne.instantiate(seed);
        let mut builder = BuilderKind::Random.instantiate(seed ^ 0x2f1, &BuilderConstants::default());
        let mut driver =
            pbgame_core::runner::BuilderDriver::new(config, painter.as_mut()).unwrap();
        let check = |state: &pbgame_core::game::GameState| {
            for v in state.vertices() {
                if !state.is_isolated(v) {
                    assert!(state.is_coloured(v), "non-isolated vertex {v} uncoloured");
                }
                assert!(state.neighbourhood_colours(v) < 2, "vertex {v} sees both classes");
            }
        };
        check(driver.state());
        while !driver.over() {
            let edges = builder.build_turn(driver.state());
            driver.play(&edges).unwrap();
            // The driver applies Builder's move and Painter's full reply, so
            // this is the state right after a Painter turn.
            check(driver.state());
        }
        assert_eq!(driver.status(), GameStatus::PainterWin);
    }
}

/// A forfeit is surfaced as a Builder win and attributed in the outcome.
#[test]
fn forfeit_is_reported_as_builder_win() {
    struct Quitter;
    impl pbgame_core::painter::PainterStrategy for Quitter {
        fn name(&self) -> &'static str {
            "quitter"
        }
        fn paint_turn(
            &mut self,
            _: &GameState,
            _: Option<&[pbgame_core::game::Edge]>,
        ) -> PainterTurn {
            PainterTurn::Forfeit
        }
    }
    let mut painter = Quitter;
    let mut builder = BuilderKind::Random.instantiate(5, &BuilderConstants::default());
    let runner = pbgame_core::runner::GameRunner::new(
        GameConfig::unbiased(4, 2).unwrap(),
        &mut painter,
        builder.as_mut(),
    )
    .unwrap();
    let (outcome, _) = runner.run().unwrap();
    assert!(outcome.forfeit);
    assert_eq!(outcome.status, GameStatus::BuilderWin);
}
