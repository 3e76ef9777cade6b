//! Switch between data-parallel and sequential execution.
//!
//! With the `parallel` feature (default) heavy loops fan out through rayon;
//! without it, or when `force_serial` is set, they run sequentially.  The
//! runtime override exists so benchmarks can compare both paths in one
//! process.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SERIAL: AtomicBool = AtomicBool::new(false);

pub fn force_serial(on: bool) {
    FORCE_SERIAL.store(on, Ordering::SeqCst);
}

pub fn is_serial() -> bool {
    if cfg!(not(feature = "parallel")) {
        return true;
    }
    FORCE_SERIAL.load(Ordering::SeqCst)
}

pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_serial() {
            return items.into_par_iter().map(f).collect();
        }
    }
    items.into_iter().map(f).collect()
}

/// Maps over `0..n` keeping index order in the output.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_serial() {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let data: Vec<u64> = (0..1000).collect();
        let par = map_collect(data.clone(), |x| x * x);
        force_serial(true);
        let ser = map_collect(data, |x| x * x);
        force_serial(false);
        assert_eq!(par, ser);
        assert_eq!(map_range(5, |i| i + 1), vec![1, 2, 3, 4, 5]);
    }
}
