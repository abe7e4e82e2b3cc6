//! Cooperative cancellation for long-running computations.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// A deadline plus a shared cancellation flag.
///
/// Clones share the flag, so cancelling one cancels all of them. Long loops
/// poll [`Budget::exhausted`] between steps.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    cancelled: Arc<AtomicBool>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        Budget {
            deadline: Some(Instant::now() + timeout),
            cancelled: Arc::default(),
        }
    }

    /// A budget ending at the earlier of our deadline and `now + timeout`,
    /// still tied to our cancellation flag.
    pub fn narrowed(&self, timeout: Option<Duration>) -> Self {
        let candidate = timeout.map(|t| Instant::now() + t);
        let deadline = match (self.deadline, candidate) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Budget {
            deadline,
            cancelled: self.cancelled.clone(),
        }
    }

    pub fn is_limited(&self) -> bool {
        self.deadline.is_some() || self.cancelled.load(Ordering::Relaxed)
    }

    pub fn cancel(&self) {
        self.cancelled.store(true, Ordering::Relaxed);
    }

    pub fn exhausted(&self) -> bool {
        self.cancelled.load(Ordering::Relaxed) || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}
