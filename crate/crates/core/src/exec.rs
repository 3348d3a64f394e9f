//! Sequential / data-parallel execution switch.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] maps batch work
//! onto the current rayon pool; without it both variants run sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// `(0..n).map(f).collect()` in the chosen mode. Output order is always index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Fallible variant of [`Exec::map`]; returns the first error by index.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = Exec::Sequential.map(100, |i| i * i);
        let b = Exec::Parallel.map(100, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn try_map_reports_error() {
        let r: Result<Vec<usize>, usize> =
            Exec::Parallel.try_map(10, |i| if i == 7 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(7));
    }
}
