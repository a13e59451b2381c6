use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{geodesic_point, hyp_norm, DiskPoint};

use super::sampler::FieldSample;

/// Anchors `ζ_r e^{2πih / [e^{n0}]}`, one per sector.
pub fn sector_anchors(r: f64, n0: f64) -> Vec<DiskPoint> {
    let sectors = n0.exp().floor().max(1.0) as usize;
    (0..sectors)
        .map(|h| geodesic_point(r, Complex64::from_polar(1.0, 2.0 * PI * h as f64 / sectors as f64)))
        .collect()
}

/// Restricted field: zero inside hyperbolic radius `r`, and `F(z) - F(anchor)`
/// outside, where the anchor is the one whose angle is nearest to `arg z`.
pub fn restricted_transform(sample: &FieldSample, r: f64, n0: f64) -> Result<FieldSample> {
    let anchors = sector_anchors(r, n0);
    let sectors = anchors.len();
    let lookup = |a: DiskPoint| {
        sample.points.iter().position(|p| (p.z() - a.z()).norm() <= 1e-12 * (1.0 + a.abs()))
    };
    let mut anchor_values: Vec<Option<f64>> = vec![None; sectors];
    let mut values = Vec::with_capacity(sample.values.len());
    for (p, &v) in sample.points.iter().zip(&sample.values) {
        if hyp_norm(*p) < r - 1e-12 {
            values.push(0.0);
            continue;
        }
        let turns = p.arg() / (2.0 * PI) * sectors as f64;
        let h = (turns.round() as i64).rem_euclid(sectors as i64) as usize;
        let base = match anchor_values[h] {
            Some(b) => b,
            None => {
                let i = lookup(anchors[h]).ok_or(Error::MissingAnchor { sector: h })?;
                anchor_values[h] = Some(sample.values[i]);
                sample.values[i]
            }
        };
        values.push(v - base);
    }
    Ok(FieldSample::new(sample.points.clone(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::zeta;

    #[test]
    fn single_sector_shift() {
        let points: Vec<DiskPoint> = (1..=10).map(|i| zeta(i as f64)).collect();
        let values: Vec<f64> = (1..=10).map(|i| (i * i) as f64).collect();
        let out = restricted_transform(&FieldSample::new(points, values), 3.0, 0.0).unwrap();
        for i in 1..=10usize {
            let expect = if i < 3 { 0.0 } else { (i * i) as f64 - 9.0 };
            assert_eq!(out.values[i - 1], expect);
        }
    }

    #[test]
    fn missing_anchor() {
        let s = FieldSample::new(vec![zeta(5.0)], vec![1.0]);
        assert!(matches!(restricted_transform(&s, 3.0, 0.0), Err(Error::MissingAnchor { sector: 0 })));
    }

    #[test]
    fn anchors_per_sector() {
        let a = sector_anchors(2.0, 2.0);
        assert_eq!(a.len(), 7);
        assert!((hyp_norm(a[3]) - 2.0).abs() < 1e-12);
    }
}
