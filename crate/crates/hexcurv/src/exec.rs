//! Face-level execution with an order-preserving map.
//!
//! Results are always collected in index order, and every reduction over
//! them runs sequentially in that order, so sums are bit-identical whether
//! or not the map itself ran in parallel.

/// How face-level work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// Rayon thread pool when the `parallel` feature is enabled, otherwise sequential.
    #[default]
    Parallel,
    /// Always on the calling thread.
    Sequential,
}

impl Exec {
    /// Map `f` over `0..n`, returning results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Map a fallible `f` over `0..n`; the first error in index order wins.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let a = Exec::Parallel.map(1000, |i| i * i);
        let b = Exec::Sequential.map(1000, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn ordered_float_sum_is_bit_stable() {
        let term = |i: usize| ((i as f64) * 0.37).sin() * 1e-3 + 1.0 / (1.0 + i as f64);
        let sum = |v: Vec<f64>| v.into_iter().fold(0.0, |a, b| a + b);
        let a = sum(Exec::Parallel.map(5000, term));
        let b = sum(Exec::Sequential.map(5000, term));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn try_map_reports_first_error_in_order() {
        let r: Result<Vec<usize>, usize> =
            Exec::Parallel.try_map(100, |i| if i % 30 == 29 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(29));
    }
}
