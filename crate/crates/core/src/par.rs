//! Data-parallel helpers. With the `rayon` feature the parallel path uses a
//! work-stealing pool; without it every call runs sequentially.

/// Picks the first expression when built with `rayon`, the second otherwise.
#[macro_export]
macro_rules! if_rayon {
    ($par:expr, $seq:expr) => {{
        #[cfg(feature = "rayon")]
        {
            $par
        }
        #[cfg(not(feature = "rayon"))]
        {
            $seq
        }
    }};
}

#[cfg(feature = "rayon")]
use rayon::prelude::*;

/// Execution mode for the parallel kernels. `Parallel` degrades to serial
/// when the crate is built without `rayon`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Serial,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        self == Exec::Parallel && cfg!(feature = "rayon")
    }
}

/// `items.map(f).collect()` in input order.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Exec::Serial => items.iter().map(f).collect(),
        Exec::Parallel => if_rayon!(items.par_iter().map(f).collect(), items.iter().map(f).collect()),
    }
}

/// `(0..n).map(f).collect()` in index order.
pub fn map_range<R, F>(exec: Exec, n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    match exec {
        Exec::Serial => (0..n).map(f).collect(),
        Exec::Parallel => if_rayon!((0..n).into_par_iter().map(f).collect(), (0..n).map(f).collect()),
    }
}
