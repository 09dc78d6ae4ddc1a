use std::time::{Duration, Instant};

/// Stopping rules for iterative solvers. The deadline is checked between
/// iterations only, so a run may overshoot it by one iteration.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_iterations: usize,
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn iterations(max_iterations: usize) -> Self {
        Limits {
            max_iterations,
            deadline: None,
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits::iterations(10_000)
    }
}
