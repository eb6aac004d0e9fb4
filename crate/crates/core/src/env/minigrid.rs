//! MiniGrid-Empty-5x5: a walled 5×5 room, agent starting at (1, 1) facing
//! right, goal at (3, 3).
//!
//! Observations are a 7×7 egocentric window, rotated so the agent faces up,
//! with the agent at view cell (3, 6). Each cell is encoded as
//! `(object, color, state)` and flattened as `((view_x · 7) + view_y) · 3 + channel`.

use super::{Environment, StepResult};
use crate::error::{Error, Result};

pub const GRID_SIZE: i32 = 5;
pub const MAX_STEPS: u32 = 100;
pub const VIEW_SIZE: i32 = 7;
pub const OBSERVATION_SIZE: usize = (VIEW_SIZE * VIEW_SIZE * 3) as usize;
pub const START_POS: (i32, i32) = (1, 1);
pub const GOAL_POS: (i32, i32) = (3, 3);

pub const OBJECT_UNSEEN: f64 = 0.0;
pub const OBJECT_EMPTY: f64 = 1.0;
pub const OBJECT_WALL: f64 = 2.0;
pub const OBJECT_GOAL: f64 = 8.0;
pub const COLOR_GOAL: f64 = 5.0;

pub const ACTION_LEFT: usize = 0;
pub const ACTION_RIGHT: usize = 1;
pub const ACTION_FORWARD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Down,
    Left,
    Up,
}

impl Direction {
    fn vector(self) -> (i32, i32) {
        match self {
            Direction::Right => (1, 0),
            Direction::Down => (0, 1),
            Direction::Left => (-1, 0),
            Direction::Up => (0, -1),
        }
    }

    fn turn_right(self) -> Self {
        match self {
            Direction::Right => Direction::Down,
            Direction::Down => Direction::Left,
            Direction::Left => Direction::Up,
            Direction::Up => Direction::Right,
        }
    }

    fn turn_left(self) -> Self {
        self.turn_right().turn_right().turn_right()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiniGridState {
    /// (col, row)
    pub agent_pos: (i32, i32),
    pub agent_dir: Direction,
    pub steps: u32,
}

impl Default for MiniGridState {
    fn default() -> Self {
        Self {
            agent_pos: START_POS,
            agent_dir: Direction::Right,
            steps: 0,
        }
    }
}

fn cell_encoding(pos: (i32, i32)) -> [f64; 3] {
    let (x, y) = pos;
    if !(0..GRID_SIZE).contains(&x) || !(0..GRID_SIZE).contains(&y) {
        [OBJECT_UNSEEN, 0.0, 0.0]
    } else if x == 0 || y == 0 || x == GRID_SIZE - 1 || y == GRID_SIZE - 1 {
        [OBJECT_WALL, 0.0, 0.0]
    } else if pos == GOAL_POS {
        [OBJECT_GOAL, COLOR_GOAL, 0.0]
    } else {
        [OBJECT_EMPTY, 0.0, 0.0]
    }
}

fn is_wall(pos: (i32, i32)) -> bool {
    cell_encoding(pos)[0] == OBJECT_WALL
}

impl MiniGridState {
    /// World position seen at view cell `(vx, vy)`.
    pub fn view_to_world(&self, vx: i32, vy: i32) -> (i32, i32) {
        let forward = VIEW_SIZE - 1 - vy;
        let lateral = vx - VIEW_SIZE / 2;
        let (fx, fy) = self.agent_dir.vector();
        let (rx, ry) = self.agent_dir.turn_right().vector();
        (
            self.agent_pos.0 + forward * fx + lateral * rx,
            self.agent_pos.1 + forward * fy + lateral * ry,
        )
    }

    pub fn observation(&self) -> Vec<f64> {
        let mut obs = Vec::with_capacity(OBSERVATION_SIZE);
        for vx in 0..VIEW_SIZE {
            for vy in 0..VIEW_SIZE {
                obs.extend(cell_encoding(self.view_to_world(vx, vy)));
            }
        }
        obs
    }
}

/// Actions: 0 turn left, 1 turn right, 2 move forward. Reaching the goal
/// pays `1 − 0.9 · steps / MAX_STEPS`; every other step pays 0. The episode
/// ends at the goal or after `MAX_STEPS` steps.
#[derive(Debug, Clone)]
pub struct MiniGrid {
    state: MiniGridState,
    done: bool,
}

impl MiniGrid {
    /// The layout is fixed, so resets consume no randomness; the seed is
    /// accepted for interface symmetry with other environments.
    pub fn new(_seed: u64) -> Self {
        Self {
            state: MiniGridState::default(),
            done: true,
        }
    }

    pub fn state(&self) -> &MiniGridState {
        &self.state
    }
}

impl Environment for MiniGrid {
    fn observation_size(&self) -> usize {
        OBSERVATION_SIZE
    }

    fn num_actions(&self) -> usize {
        3
    }

    fn reset(&mut self) -> Vec<f64> {
        self.state = MiniGridState::default();
        self.done = false;
        self.state.observation()
    }

    fn step(&mut self, action: usize) -> Result<StepResult> {
        if self.done {
            return Err(Error::Usage(
                "minigrid episode is finished; call reset".into(),
            ));
        }
        let s = &mut self.state;
        s.steps += 1;
        let mut reward = 0.0;
        let mut reached = false;
        match action {
            ACTION_LEFT => s.agent_dir = s.agent_dir.turn_left(),
            ACTION_RIGHT => s.agent_dir = s.agent_dir.turn_right(),
            ACTION_FORWARD => {
                let (dx, dy) = s.agent_dir.vector();
                let next = (s.agent_pos.0 + dx, s.agent_pos.1 + dy);
                if !is_wall(next) {
                    s.agent_pos = next;
                }
                if next == GOAL_POS {
                    reached = true;
                    reward = 1.0 - 0.9 * (f64::from(s.steps) / f64::from(MAX_STEPS));
                }
            }
            other => {
                s.steps -= 1;
                return Err(Error::Index {
                    what: "minigrid action",
                    index: other,
                    limit: 3,
                });
            }
        }
        self.done = reached || s.steps >= MAX_STEPS;
        Ok(StepResult {
            observation: s.observation(),
            reward,
            done: self.done,
        })
    }
}
