//! Data-parallel helpers. With the `parallel` feature off every path runs
//! sequentially and `Execution::Parallel` is accepted but ignored.

/// How batch work inside the library is scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map.
pub(crate) fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving flat map over an integer range split into chunks.
pub(crate) fn flat_map_range<R, F>(exec: Execution, lo: u64, hi: u64, chunk: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64, u64) -> Vec<R> + Sync + Send,
{
    if hi < lo {
        return Vec::new();
    }
    let chunk = chunk.max(1);
    let starts: Vec<u64> = (lo..=hi).step_by(chunk as usize).collect();
    map(exec, &starts, |&s| f(s, (s + chunk - 1).min(hi)))
        .into_iter()
        .flatten()
        .collect()
}
