//! Drives games: applies agent turns through the engine, collects the event
//! stream, and reports the outcome.

use thiserror::Error;

use crate::builder::BuilderStrategy;
use crate::events::{Action, Actor, Event, Mark, Placement};
use crate::game::{ConfigError, Edge, GameConfig, GameState, GameStatus, MoveError, Turn};
use crate::painter::{PainterStrategy, PainterTurn};

#[derive(Debug, Error)]
pub enum DriveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("illegal move: {0}")]
    Move(#[from] MoveError),
    #[error("painter agent returned {got} paints, turn requires {expected}")]
    PaintCount { expected: u32, got: usize },
    #[error("game exceeded the round limit, runner or agent bug")]
    RoundLimit,
}

/// How a finished game ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: GameStatus,
    pub rounds: u32,
    pub painter_moves: u32,
    pub builder_moves: u32,
    pub forfeit: bool,
}

/// Engine plus Painter: Builder moves are injected from outside, Painter
/// replies automatically. The Builder phase procedures drive games through
/// this handle.
pub struct BuilderDriver<'a> {
    state: GameState,
    painter: &'a mut dyn PainterStrategy,
    last_build: Option<Vec<Edge>>,
    pub events: Vec<Event>,
    forfeited: bool,
}

impl<'a> BuilderDriver<'a> {
    /// Start a game; Painter's opening turn is played immediately.
    pub fn new(
        config: GameConfig,
        painter: &'a mut dyn PainterStrategy,
    ) -> Result<Self, DriveError> {
        let state = GameState::new(config)?;
        let mut driver = BuilderDriver {
            state,
            painter,
            last_build: None,
            events: Vec::new(),
            forfeited: false,
        };
        driver.painter_turn()?;
        Ok(driver)
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn forfeited(&self) -> bool {
        self.forfeited
    }

    /// Status as the runner sees it: a forfeit is a Builder win even though
    /// the engine position itself may still be ongoing.
    pub fn status(&self) -> GameStatus {
        if self.forfeited && self.state.status() == GameStatus::Ongoing {
            GameStatus::BuilderWin
        } else {
            self.state.status()
        }
    }

    pub fn over(&self) -> bool {
        self.status() != GameStatus::Ongoing
    }

    fn painter_turn(&mut self) -> Result<(), DriveError> {
        if self.over() {
            return Ok(());
        }
        debug_assert_eq!(self.state.turn(), Turn::Painter);
        let expected = self.state.paints_left();
        match self.painter.paint_turn(&self.state, self.last_build.as_deref()) {
            PainterTurn::Forfeit => {
                self.forfeited = true;
            }
            PainterTurn::Paints(paints) => {
                if paints.len() as u32 != expected {
                    return Err(DriveError::PaintCount {
                        expected,
                        got: paints.len(),
                    });
                }
                for (v, c) in paints {
                    self.state.apply_paint(v, c)?;
                    self.events.push(Event::Move {
                        actor: Actor::Painter,
                        action: Action::Paint {
                            vertex: v,
                            colour: c,
                        },
                    });
                    if self.state.status() != GameStatus::Ongoing {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    /// One full round: the Builder move (with its annotations), then
    /// Painter's reply if the game goes on.
    pub fn play_annotated(
        &mut self,
        edges: &[Edge],
        before: Vec<Mark>,
        after: Vec<Mark>,
    ) -> Result<GameStatus, DriveError> {
        if self.over() {
            return Ok(self.status());
        }
        for m in before {
            self.events.push(Event::Mark(m));
        }
        self.state.apply_build(edges)?;
        self.events.push(Event::Move {
            actor: Actor::Builder,
            action: Action::Build {
                edges: edges.to_vec(),
            },
        });
        for m in after {
            self.events.push(Event::Mark(m));
        }
        self.last_build = Some(edges.to_vec());
        if self.state.status() == GameStatus::Ongoing {
            self.painter_turn()?;
        }
        Ok(self.status())
    }

    pub fn play(&mut self, edges: &[Edge]) -> Result<GameStatus, DriveError> {
        self.play_annotated(edges, Vec::new(), Vec::new())
    }

    pub fn outcome(&self) -> Outcome {
        Outcome {
            status: self.status(),
            rounds: self.state.round(),
            painter_moves: self.state.painter_moves(),
            builder_moves: self.state.builder_moves(),
            forfeit: self.forfeited,
        }
    }
}

/// Both agents attached: runs a full game.
pub struct GameRunner<'a, 'b> {
    driver: BuilderDriver<'a>,
    builder: &'b mut dyn BuilderStrategy,
}

impl<'a, 'b> GameRunner<'a, 'b> {
    pub fn new(
        config: GameConfig,
        painter: &'a mut dyn PainterStrategy,
        builder: &'b mut dyn BuilderStrategy,
    ) -> Result<Self, DriveError> {
        Ok(GameRunner {
            driver: BuilderDriver::new(config, painter)?,
            builder,
        })
    }

    pub fn run(mut self) -> Result<(Outcome, Vec<Event>), DriveError> {
        let round_limit = self.driver.state().n() + 4;
        while !self.driver.over() {
            let edges = self.builder.build_turn(self.driver.state());
            let marks = self.builder.take_marks();
            let mut before = Vec::new();
            let mut after = Vec::new();
            for (placement, mark) in marks {
                match placement {
                    Placement::BeforeMove => before.push(mark),
                    Placement::AfterMove => after.push(mark),
                }
            }
            self.driver.play_annotated(&edges, before, after)?;
            if self.driver.state().round() > round_limit {
                return Err(DriveError::RoundLimit);
            }
        }
        Ok((self.driver.outcome(), self.driver.events))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::RandomBuilder;
    use crate::game::GameConfig;
    use crate::painter::FirstFitPainter;

    #[test]
    fn painter_win_takes_exactly_n_painter_moves() {
        // Unbiased game with a generous palette: Painter always wins and her
        // move count equals n.
        for n in [4u32, 7, 10] {
            let mut painter = FirstFitPainter::new();
            let mut builder = RandomBuilder::new(3);
            let cfg = GameConfig::unbiased(n, n).unwrap();
            let runner = GameRunner::new(cfg, &mut painter, &mut builder).unwrap();
            let (outcome, _) = runner.run().unwrap();
            assert_eq!(outcome.status, GameStatus::PainterWin);
            assert_eq!(outcome.painter_moves, n);
        }
    }

    #[test]
    fn k1_game_is_lost_quickly() {
        let mut painter = FirstFitPainter::new();
        let mut builder = RandomBuilder::new(9);
        let cfg = GameConfig::unbiased(6, 1).unwrap();
        let (outcome, events) = GameRunner::new(cfg, &mut painter, &mut builder)
            .unwrap()
            .run()
            .unwrap();
        assert_eq!(outcome.status, GameStatus::BuilderWin);
        assert!(!events.is_empty());
    }
}
