//! Data-parallel helpers. With the `parallel` feature (default) these run on
//! rayon's pool; without it they are plain sequential loops.

use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

/// The mode used by the library's own batch loops.
pub const DEFAULT: Mode = if cfg!(feature = "parallel") { Mode::Parallel } else { Mode::Sequential };

pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_with(DEFAULT, items, f)
}

pub fn map_range<U, F>(r: Range<u64>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(u64) -> U + Sync + Send,
{
    map_range_with(DEFAULT, r, f)
}

pub fn map_with<T, U, F>(mode: Mode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

pub fn map_range_with<U, F>(mode: Mode, r: Range<u64>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(u64) -> U + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            r.into_par_iter().map(f).collect()
        }
        _ => r.map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let v: Vec<u64> = (0..100).collect();
        let a = map_with(Mode::Sequential, &v, |x| x * x);
        let b = map_with(Mode::Parallel, &v, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(map_range(0..10, |x| x + 1), (1..11).collect::<Vec<_>>());
    }
}
