//! Element-loop execution policy.
//!
//! Every element-local computation in the crate goes through [`map_indexed`],
//! which returns results in index order regardless of the policy. Global
//! reductions always happen afterwards, serially, in ascending index order, so
//! results do not depend on the thread count.

/// How element-local loops are executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Rayon work-stealing. Falls back to serial when the `parallel`
    /// feature is disabled.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this policy actually runs on more than one thread in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(0..n)` and collects the results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Like [`map_indexed`] but fallible. On failure, the error of the lowest
/// failing index is returned, whatever the execution order was.
pub fn try_map_indexed<T, E, F>(exec: Execution, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(exec, n, f).into_iter().collect()
}
