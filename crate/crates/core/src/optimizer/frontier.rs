//! Upper-right convex hull of rate pairs and frontier comparisons.

use crate::region::{RateMeta, RatePair, Scheme};

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Pareto-optimal vertices of the convex closure of `points` (plus the origin
/// and both axis projections), sorted by `r1` ascending with `r2` strictly
/// decreasing. An empty or all-zero cloud yields `[(0, 0)]`.
pub fn upper_right_hull(points: &[RatePair], scheme: Scheme) -> Vec<RatePair> {
    let finite: Vec<&RatePair> = points
        .iter()
        .filter(|p| p.r1.is_finite() && p.r2.is_finite())
        .collect();
    let x_max = finite.iter().map(|p| p.r1).fold(0.0, f64::max);
    let y_max = finite.iter().map(|p| p.r2).fold(0.0, f64::max);
    let anchor = |r1: f64, r2: f64| RatePair::new(r1, r2, RateMeta::new(scheme));

    let mut cloud: Vec<RatePair> = finite.into_iter().cloned().collect();
    cloud.push(anchor(0.0, 0.0));
    cloud.push(anchor(x_max, 0.0));
    cloud.push(anchor(0.0, y_max));
    // stable: among equal coordinates the first (real) point wins
    cloud.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(b.r2.total_cmp(&a.r2)));
    cloud.dedup_by(|b, a| a.r1 == b.r1 && a.r2 == b.r2);

    let mut hull: Vec<RatePair> = Vec::new();
    for p in cloud {
        while hull.len() >= 2 {
            let k = hull.len();
            let o = (hull[k - 2].r1, hull[k - 2].r2);
            let a = (hull[k - 1].r1, hull[k - 1].r2);
            if cross(o, a, (p.r1, p.r2)) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let frontier: Vec<RatePair> = hull
        .iter()
        .filter(|p| {
            !hull
                .iter()
                .any(|q| q.r1 >= p.r1 && q.r2 >= p.r2 && (q.r1 > p.r1 || q.r2 > p.r2))
        })
        .cloned()
        .collect();
    if frontier.is_empty() {
        vec![anchor(0.0, 0.0)]
    } else {
        frontier
    }
}

/// Best `r2` achievable together with at least `r1` on a frontier, or `None`
/// if `r1` exceeds the frontier's reach.
pub fn frontier_r2_at(frontier: &[RatePair], r1: f64) -> Option<f64> {
    let first = frontier.first()?;
    if r1 <= first.r1 {
        return Some(first.r2);
    }
    for w in frontier.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if r1 <= b.r1 {
            let t = (r1 - a.r1) / (b.r1 - a.r1);
            return Some(a.r2 + t * (b.r2 - a.r2));
        }
    }
    None
}

/// Largest amount by which a `lower` frontier vertex pokes out of the region
/// under `upper`, after granting `slack` in both coordinates. Values `<= 0`
/// mean `upper` dominates `lower`.
pub fn dominance_violation(upper: &[RatePair], lower: &[RatePair], slack: f64) -> f64 {
    let reach = upper.last().map_or(0.0, |p| p.r1);
    lower
        .iter()
        .map(|p| {
            let x = (p.r1 - slack).max(0.0);
            if x > reach {
                return x - reach;
            }
            let y = frontier_r2_at(upper, x).unwrap_or(0.0);
            p.r2 - slack - y
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn dominates(upper: &[RatePair], lower: &[RatePair], slack: f64) -> bool {
    dominance_violation(upper, lower, slack) <= 0.0
}

/// Largest reported standard error over a set of points.
pub fn max_stderr(points: &[RatePair]) -> f64 {
    points
        .iter()
        .map(|p| p.meta.r1_stderr.max(p.meta.r2_stderr))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(r1: f64, r2: f64) -> RatePair {
        RatePair::new(r1, r2, RateMeta::new(Scheme::StatisticalCsit))
    }

    fn coords(f: &[RatePair]) -> Vec<(f64, f64)> {
        f.iter().map(|p| (p.r1, p.r2)).collect()
    }

    #[test]
    fn empty_is_origin() {
        assert_eq!(coords(&upper_right_hull(&[], Scheme::TimeSharing)), vec![(0.0, 0.0)]);
        assert_eq!(
            coords(&upper_right_hull(&[pt(0.0, 0.0), pt(0.0, 0.0)], Scheme::TimeSharing)),
            vec![(0.0, 0.0)]
        );
    }

    #[test]
    fn drops_interior_and_collinear_points() {
        let pts = [pt(1.0, 0.0), pt(0.5, 0.5), pt(0.0, 1.0), pt(0.2, 0.2), pt(0.6, 0.6)];
        assert_eq!(
            coords(&upper_right_hull(&pts, Scheme::StatisticalCsit)),
            vec![(0.0, 1.0), (0.6, 0.6), (1.0, 0.0)]
        );
    }

    #[test]
    fn axis_collapse_keeps_single_point() {
        let pts = [pt(0.3, 0.0), pt(0.8, 0.0)];
        assert_eq!(coords(&upper_right_hull(&pts, Scheme::StatisticalCsit)), vec![(0.8, 0.0)]);
    }

    #[test]
    fn interpolation_and_dominance() {
        let upper = upper_right_hull(&[pt(0.0, 2.0), pt(2.0, 0.0)], Scheme::FullCsit);
        assert_eq!(frontier_r2_at(&upper, 1.0), Some(1.0));
        assert_eq!(frontier_r2_at(&upper, 3.0), None);
        let lower = upper_right_hull(&[pt(0.0, 1.0), pt(1.0, 0.0)], Scheme::TimeSharing);
        assert!(dominates(&upper, &lower, 0.0));
        assert!(!dominates(&lower, &upper, 0.0));
        assert!(dominates(&lower, &upper, 1.0));
    }
}
