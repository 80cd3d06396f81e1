use crate::error::{Error, Result};

/// Largest sample for which reports compute the O(N^2) extreme discrepancy.
pub const EXTREME_CAP: usize = 10_000;

fn sorted_checked(points: &[f64]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::Empty("discrepancy of an empty sample".into()));
    }
    if let Some(bad) = points.iter().find(|x| !(0.0..1.0).contains(*x)) {
        return Err(Error::Domain(format!("point {bad} outside [0, 1)")));
    }
    let mut v = points.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Star discrepancy `sup_t |#{x_i < t}/N - t|`, computed from the sorted sample as
/// `max_i max(i/N - x_(i), x_(i) - (i-1)/N)`.
pub fn star_discrepancy(points: &[f64]) -> Result<f64> {
    let v = sorted_checked(points)?;
    let n = v.len() as f64;
    Ok(v.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let above = (i + 1) as f64 / n - x;
        let below = x - i as f64 / n;
        acc.max(above).max(below)
    }))
}

/// Extreme discrepancy `sup_{[a,b] in [0,1]} |#{x_i in [a,b]}/N - (b - a)|`.
///
/// The supremum is attained (or approached) by closed intervals between sample
/// values, for excess mass, and by open gaps between consecutive-or-not sample
/// values or the ends of `[0, 1]`, for deficit. Both are enumerated over pairs of
/// distinct values, O(N^2).
pub fn extreme_discrepancy(points: &[f64]) -> Result<f64> {
    let v = sorted_checked(points)?;
    let n = v.len() as f64;
    // distinct values with 0 and 1 always present; cum[k] = #points <= vals[k]
    let mut vals = vec![0.0];
    let mut cum = vec![0usize];
    for &x in &v {
        if x == *vals.last().unwrap() {
            *cum.last_mut().unwrap() += 1;
        } else {
            let c = *cum.last().unwrap();
            vals.push(x);
            cum.push(c + 1);
        }
    }
    vals.push(1.0);
    cum.push(v.len());
    let m = vals.len();
    let mut best = 0.0f64;
    for i in 0..m {
        let before_i = if i == 0 { 0 } else { cum[i - 1] };
        for j in i..m {
            let len = vals[j] - vals[i];
            // closed [v_i, v_j]
            let closed = (cum[j] - before_i) as f64 / n - len;
            best = best.max(closed);
            // open (v_i, v_j)
            if j > i {
                let open = len - (cum[j - 1] - cum[i]) as f64 / n;
                best = best.max(open);
            }
        }
    }
    Ok(best.min(1.0))
}
