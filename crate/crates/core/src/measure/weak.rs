use num_complex::Complex64;

use crate::polyhom::ProjPoint;

/// Weighted points on P¹ plus an unlocated remainder `tail`.
#[derive(Clone, Debug, Default)]
pub struct PointCloud {
    pub pts: Vec<ProjPoint<Complex64>>,
    pub weights: Vec<f64>,
    pub tail: f64,
}

impl PointCloud {
    /// Uniform weights on `pts`.
    pub fn uniform(pts: Vec<ProjPoint<Complex64>>) -> Self {
        let w = 1.0 / pts.len().max(1) as f64;
        PointCloud { weights: vec![w; pts.len()], pts, tail: 0.0 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WeakOpts {
    /// Chordal radius of the caps around the reference atoms.
    pub r_cap: f64,
    /// Number of heaviest reference atoms that get their own cap.
    pub top_n: usize,
}

impl Default for WeakOpts {
    fn default() -> Self {
        WeakOpts { r_cap: 0.05, top_n: 16 }
    }
}

/// Cap discrepancy between `mu` and the reference `nu`.
///
/// The sphere is cut into the caps `B(a_i, r_cap)` around the `top_n`
/// heaviest points of `nu` (a point belongs to the first, i.e. heaviest, cap
/// containing it) and the remaining region. Each measure gives every cell a
/// mass interval `[m, m + tail]`; the result is the largest gap between the
/// two intervals over all cells, so it lies in `[0, 1]`.
pub fn weak_distance(mu: &PointCloud, nu: &PointCloud, opts: &WeakOpts) -> f64 {
    let mut order: Vec<usize> = (0..nu.pts.len()).collect();
    order.sort_by(|&a, &b| nu.weights[b].partial_cmp(&nu.weights[a]).unwrap_or(std::cmp::Ordering::Equal));
    let centers: Vec<&ProjPoint<Complex64>> = order.iter().take(opts.top_n).map(|&i| &nu.pts[i]).collect();
    let cell_of = |p: &ProjPoint<Complex64>| -> usize {
        centers.iter().position(|c| c.chordal(p) <= opts.r_cap).unwrap_or(centers.len())
    };
    let ncell = centers.len() + 1;
    let masses = |m: &PointCloud| {
        let mut out = vec![0.0; ncell];
        for (p, w) in m.pts.iter().zip(&m.weights) {
            out[cell_of(p)] += w;
        }
        out
    };
    let a = masses(mu);
    let b = masses(nu);
    (0..ncell)
        .map(|k| {
            let gap1 = b[k] - (a[k] + mu.tail);
            let gap2 = a[k] - (b[k] + nu.tail);
            gap1.max(gap2).max(0.0)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: f64) -> ProjPoint<Complex64> {
        ProjPoint::finite(Complex64::new(re, 0.0))
    }

    #[test]
    fn self_distance_zero() {
        let m = PointCloud { pts: vec![pt(0.0), pt(1.0)], weights: vec![0.5, 0.5], tail: 0.0 };
        assert_eq!(weak_distance(&m, &m, &WeakOpts::default()), 0.0);
    }

    #[test]
    fn opposite_poles_are_far() {
        let a = PointCloud { pts: vec![pt(0.0)], weights: vec![1.0], tail: 0.0 };
        let b = PointCloud { pts: vec![ProjPoint::infinity()], weights: vec![1.0], tail: 0.0 };
        assert_eq!(weak_distance(&a, &b, &WeakOpts::default()), 1.0);
    }

    #[test]
    fn tail_absorbs_missing_mass() {
        let a = PointCloud { pts: vec![pt(0.0)], weights: vec![0.9], tail: 0.1 };
        let b = PointCloud { pts: vec![pt(0.0), pt(5.0)], weights: vec![0.9, 0.1], tail: 0.0 };
        assert!(weak_distance(&a, &b, &WeakOpts::default()) < 1e-12);
    }
}
