use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Environment, StepResult};
use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.8;
pub const CART_MASS: f64 = 1.0;
pub const POLE_MASS: f64 = 0.1;
pub const HALF_LENGTH: f64 = 0.5;
pub const FORCE: f64 = 10.0;
pub const TAU: f64 = 0.02;
pub const ANGLE_LIMIT: f64 = 12.0 * std::f64::consts::PI / 180.0;
pub const POSITION_LIMIT: f64 = 2.4;
pub const STEP_CAP: u32 = 500;
pub const OBSERVATION_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub steps: u32,
}

impl CartPoleState {
    pub fn observation(&self) -> Vec<f64> {
        vec![self.x, self.x_dot, self.theta, self.theta_dot]
    }

    pub fn is_terminal(&self) -> bool {
        self.x.abs() > POSITION_LIMIT || self.theta.abs() > ANGLE_LIMIT || self.steps >= STEP_CAP
    }

    /// One explicit-Euler step. Accelerations use the pre-update state;
    /// positions advance with the old velocities.
    pub fn advance(&self, action: usize) -> Self {
        let force = if action == 1 { FORCE } else { -FORCE };
        let total_mass = CART_MASS + POLE_MASS;
        let pole_mass_length = POLE_MASS * HALF_LENGTH;
        let (sin, cos) = self.theta.sin_cos();
        let temp = (force + pole_mass_length * self.theta_dot * self.theta_dot * sin) / total_mass;
        let theta_acc = (GRAVITY * sin - cos * temp)
            / (HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / total_mass));
        let x_acc = temp - pole_mass_length * theta_acc * cos / total_mass;
        Self {
            x: self.x + TAU * self.x_dot,
            x_dot: self.x_dot + TAU * x_acc,
            theta: self.theta + TAU * self.theta_dot,
            theta_dot: self.theta_dot + TAU * theta_acc,
            steps: self.steps + 1,
        }
    }
}

/// Actions: 0 pushes left, 1 pushes right. Reward is 1.0 on every step,
/// including the terminal one.
#[derive(Debug, Clone)]
pub struct CartPole {
    rng: ChaCha8Rng,
    state: CartPoleState,
    done: bool,
}

impl CartPole {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            state: CartPoleState::default(),
            done: true,
        }
    }

    pub fn state(&self) -> &CartPoleState {
        &self.state
    }

    /// Starts an episode from an explicit state.
    pub fn reset_to(&mut self, state: CartPoleState) -> Vec<f64> {
        self.state = state;
        self.done = state.is_terminal();
        state.observation()
    }
}

impl Environment for CartPole {
    fn observation_size(&self) -> usize {
        OBSERVATION_SIZE
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn reset(&mut self) -> Vec<f64> {
        let mut draw = || self.rng.gen_range(-0.05..=0.05);
        let state = CartPoleState {
            x: draw(),
            x_dot: draw(),
            theta: draw(),
            theta_dot: draw(),
            steps: 0,
        };
        self.reset_to(state)
    }

    fn step(&mut self, action: usize) -> Result<StepResult> {
        if self.done {
            return Err(Error::Usage(
                "cartpole episode is finished; call reset".into(),
            ));
        }
        if action > 1 {
            return Err(Error::Index {
                what: "cartpole action",
                index: action,
                limit: 2,
            });
        }
        self.state = self.state.advance(action);
        self.done = self.state.is_terminal();
        Ok(StepResult {
            observation: self.state.observation(),
            reward: 1.0,
            done: self.done,
        })
    }
}
