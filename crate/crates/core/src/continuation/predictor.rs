use crate::error::{Error, Result};

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Extrapolates the branch one step `delta` beyond its last point.
///
/// With three or more points the last three are interpolated by a quadratic
/// in accumulated chord length; with two, the secant is followed.
pub fn predictor(history: &[&[f64]], delta: f64) -> Result<Vec<f64>> {
    match history.len() {
        0 | 1 => Err(Error::Contract("predictor needs at least two points".into())),
        2 => {
            let (a, b) = (history[0], history[1]);
            let len = distance(a, b);
            if len == 0.0 {
                return Err(Error::Numerical("coincident history points".into()));
            }
            Ok(a.iter().zip(b).map(|(x0, x1)| x1 + delta * (x1 - x0) / len).collect())
        }
        n => {
            let (p0, p1, p2) = (history[n - 3], history[n - 2], history[n - 1]);
            let s1 = distance(p0, p1);
            let s2 = s1 + distance(p1, p2);
            if s1 == 0.0 || s2 == s1 {
                return Err(Error::Numerical("coincident history points".into()));
            }
            let s = s2 + delta;
            // Lagrange weights at nodes 0, s1, s2.
            let w0 = (s - s1) * (s - s2) / (s1 * s2);
            let w1 = s * (s - s2) / (s1 * (s1 - s2));
            let w2 = s * (s - s1) / (s2 * (s2 - s1));
            Ok((0..p2.len()).map(|i| w0 * p0[i] + w1 * p1[i] + w2 * p2[i]).collect())
        }
    }
}
