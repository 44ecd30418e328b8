//! Thin switch between rayon and plain iterators, selected by the
//! `parallel` feature. Results are always returned in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// First index attaining the maximum of `f` over `0..n`, with the value.
/// Ties resolve to the lowest index in both modes.
pub fn argmax<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let pick = |a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .with_min_len(1024)
            .map(|i| (i, f(i)))
            .reduce_with(pick)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(|i| (i, f(i))).reduce(pick)
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_first_tie() {
        let v = [1.0, 3.0, 2.0, 3.0];
        assert_eq!(argmax(v.len(), |i| v[i]), Some((1, 3.0)));
        assert_eq!(argmax(0, |_| 0.0), None);
    }

    #[test]
    fn map_keeps_order() {
        let v: Vec<usize> = (0..1000).collect();
        assert_eq!(map(&v, |x| x * 2), map_range(1000, |i| i * 2));
    }
}
