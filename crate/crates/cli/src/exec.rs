use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use stokes_perturb_core::harness::Executor;

/// Runs jobs on up to `threads` scoped worker threads. Results come back in
/// job order, so output does not depend on scheduling.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub threads: usize,
}

impl Executor for Threaded {
    fn map<T, F>(&self, jobs: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let workers = self.threads.clamp(1, jobs.max(1));
        if workers == 1 {
            return (0..jobs).map(f).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..jobs).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    if k >= jobs {
                        break;
                    }
                    let out = f(k);
                    slots.lock().unwrap()[k] = Some(out);
                });
            }
        });
        slots.into_inner().unwrap().into_iter().map(|t| t.expect("every job ran")).collect()
    }
}
