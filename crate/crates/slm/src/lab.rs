//! Parallel replication runner for the simulation drivers.

use std::ops::Range;
use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use slm_core::sim::ReplicationResult;

pub const THREADS_ENV: &str = "SLM_THREADS";

/// Worker count: `SLM_THREADS` when set to a positive integer, else the hardware count.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        ThreadPoolBuilder::new()
            .num_threads(thread_count())
            .build()
            .expect("thread pool")
    })
}

/// Runs replications on the shared pool; results come back in replication order.
pub fn parallel(f: &(dyn Fn(u64) -> ReplicationResult + Sync), reps: Range<u64>) -> Vec<ReplicationResult> {
    pool().install(|| reps.into_par_iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use slm_core::sim::{benchmark_with, serial, BenchConfig, Method, ModelId, SimulationSpec};

    #[test]
    fn parallel_matches_serial() {
        let spec = SimulationSpec::new(ModelId::Two, 4, 3, 15, 15, 3).unwrap();
        let methods = [Method::Dsda, Method::Bayes];
        let cfg = BenchConfig::default();
        let a = benchmark_with(&spec, &methods, 4, &cfg, &parallel).unwrap();
        let b = benchmark_with(&spec, &methods, 4, &cfg, &serial).unwrap();
        assert_eq!(a, b);
    }
}
