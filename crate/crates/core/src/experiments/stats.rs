use crate::geometry::Vec3;

pub fn mean_vec(v: &[Vec3<f64>]) -> Vec3<f64> {
    if v.is_empty() {
        return Vec3::zero();
    }
    let mut s = Vec3::zero();
    for e in v {
        s += *e;
    }
    s / v.len() as f64
}

/// Sample standard deviation of error vectors about their mean (square root
/// of the trace of the sample covariance); 0 for fewer than two samples.
pub fn variable_error(v: &[Vec3<f64>]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean_vec(v);
    let ss: f64 = v.iter().map(|e| (*e - m).norm_squared()).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

/// True when the sequence rises (non-strictly) to its maximum and then
/// falls (non-strictly).
pub fn is_unimodal(values: &[f64]) -> bool {
    let Some(peak) = argmax(values) else {
        return true;
    };
    values[..=peak].windows(2).all(|w| w[0] <= w[1])
        && values[peak..].windows(2).all(|w| w[0] >= w[1])
}

pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Mean variable error over probes in the central third of the segment
/// divided by that over the outer sixths. `points` are `(along, VE)` with
/// `along` in `[0, length]`. Reported as 1 when the near-landmark error is
/// zero or a bin is empty.
pub fn mid_near_ratio(points: &[(f64, f64)], length: f64) -> f64 {
    let bin_mean = |keep: &dyn Fn(f64) -> bool| {
        let sel: Vec<f64> = points
            .iter()
            .filter(|(u, _)| keep(*u))
            .map(|(_, ve)| *ve)
            .collect();
        (!sel.is_empty()).then(|| sel.iter().sum::<f64>() / sel.len() as f64)
    };
    let near = bin_mean(&|u| u < length / 6.0 || u > length * 5.0 / 6.0);
    let mid = bin_mean(&|u| u >= length / 3.0 && u <= length * 2.0 / 3.0);
    match (near, mid) {
        (Some(n), Some(m)) if n > 1e-12 => m / n,
        _ => 1.0,
    }
}
