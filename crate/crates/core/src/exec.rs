//! Data-parallel helpers. With the `parallel` feature (default) work is spread
//! over rayon's pool; without it, or with [`Execution::Sequential`], the same
//! code runs on the calling thread. Results are identical either way: maps
//! preserve order and reductions are order-independent.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// True when work will actually fan out.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving filter-map.
pub fn filter_map<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.into_par_iter().filter_map(f).collect();
    }
    let _ = exec;
    items.into_iter().filter_map(f).collect()
}

/// Index and value of the largest score; ties go to the lowest index.
pub fn argmax(exec: Execution, scores: &[f64]) -> Option<(usize, f64)> {
    let pick = |a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return scores.par_iter().copied().enumerate().filter(|(_, v)| !v.is_nan()).reduce_with(pick);
    }
    let _ = exec;
    scores.iter().copied().enumerate().filter(|(_, v)| !v.is_nan()).reduce(pick)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1013) as f64).collect();
        for exec in [Execution::Parallel, Execution::Sequential] {
            let ys = map(exec, &xs, |x| x * 2.0);
            assert_eq!(ys[10], xs[10] * 2.0);
            let evens = filter_map(exec, xs.clone(), |x| (x as u64).is_multiple_of(2).then_some(x));
            assert!(evens.iter().all(|x| (*x as u64).is_multiple_of(2)));
        }
        assert_eq!(argmax(Execution::Parallel, &xs), argmax(Execution::Sequential, &xs));
        assert_eq!(argmax(Execution::Sequential, &[1.0, 3.0, 3.0]), Some((1, 3.0)));
        assert_eq!(argmax(Execution::Sequential, &[]), None);
    }
}
