//! Execution policy for the data-parallel kernels.
//!
//! Every kernel in the crate is written once against the helpers below. With the
//! `parallel` feature the helpers dispatch to rayon; without it (or with
//! [`Execution::Sequential`]) they run on the calling thread. Each work item is
//! computed by exactly the same code in both modes, so results are bit-identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a kernel distributes its independent work items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, otherwise
    /// falls back to [`Execution::Sequential`].
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Applies `f` to every chunk of `data` (chunks of `chunk` elements, the last
/// one possibly shorter), passing the chunk index and a per-worker scratch value.
pub fn for_each_chunk<T, S, I, F>(exec: Execution, data: &mut [T], chunk: usize, init: I, f: F)
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each_init(&init, |s, (i, c)| f(s, i, c));
        return;
    }
    let _ = exec;
    let mut s = init();
    for (i, c) in data.chunks_mut(chunk).enumerate() {
        f(&mut s, i, c);
    }
}

/// Fills `out[i] = f(i)`.
pub fn fill_indexed<T, F>(exec: Execution, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
        return;
    }
    let _ = exec;
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<A, B, F>(exec: Execution, items: &[A], f: F) -> Vec<B>
where
    A: Sync,
    B: Send,
    F: Fn(&A) -> B + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maximum of `f(i)` over `0..n`; `0.0` for an empty range. NaN propagates.
pub fn max_indexed<F>(exec: Execution, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let pick = |a: f64, b: f64| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(&f).reduce(|| 0.0, pick);
    }
    let _ = exec;
    (0..n).map(f).fold(0.0, pick)
}

/// Runs `f` inside a dedicated pool of `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let mut a = vec![0.0f64; 1000];
        let mut b = a.clone();
        fill_indexed(Execution::Sequential, &mut a, |i| (i as f64).sqrt());
        fill_indexed(Execution::Parallel, &mut b, |i| (i as f64).sqrt());
        assert_eq!(a, b);
        let m1 = max_indexed(Execution::Sequential, 1000, |i| a[i]);
        let m2 = max_indexed(Execution::Parallel, 1000, |i| a[i]);
        assert_eq!(m1, m2);
        assert!(max_indexed(Execution::Parallel, 3, |_| f64::NAN).is_nan());
    }

    #[test]
    fn chunks_see_their_index() {
        let mut v = vec![0usize; 10];
        for_each_chunk(Execution::Parallel, &mut v, 3, || (), |_, i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(v, vec![0, 0, 0, 1, 1, 1, 2, 2, 2, 3]);
    }
}
