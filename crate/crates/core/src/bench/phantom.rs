//! Modified Shepp-Logan head phantom.

use crate::error::{Error, Result};
use crate::signal::{Signal, Topology};

/// An ellipse added to the phantom: `intensity` inside
/// `((x' / a)^2 + (y' / b)^2 <= 1)` where `(x', y')` is the offset from
/// `center` rotated by `-angle_deg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub intensity: f64,
    pub semi_x: f64,
    pub semi_y: f64,
    pub center: (f64, f64),
    pub angle_deg: f64,
}

const fn ellipse(
    intensity: f64,
    semi_x: f64,
    semi_y: f64,
    cx: f64,
    cy: f64,
    angle_deg: f64,
) -> Ellipse {
    Ellipse {
        intensity,
        semi_x,
        semi_y,
        center: (cx, cy),
        angle_deg,
    }
}

/// The ten-ellipse table with the higher-contrast "modified" intensities.
pub const MODIFIED_SHEPP_LOGAN: [Ellipse; 10] = [
    ellipse(1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    ellipse(-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    ellipse(-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    ellipse(-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    ellipse(0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    ellipse(0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    ellipse(0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    ellipse(0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    ellipse(0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    ellipse(0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
];

/// Renders an `n x n` phantom.
///
/// Pixel centers are point-sampled on `[-1, 1]^2` with `x` increasing to the
/// right and `y` increasing upward (row 0 is `y = 1`). Sums are clamped to
/// `[0, 1]` to absorb rounding where ellipses cancel exactly.
pub fn phantom(n: usize) -> Result<Signal> {
    if n == 0 {
        return Err(Error::param("size", "phantom size must be at least 1"));
    }
    let half = (n as f64 - 1.0) / 2.0;
    let coord = |k: usize| {
        if n == 1 {
            0.0
        } else {
            (k as f64 - half) / half
        }
    };
    let prepared: Vec<_> = MODIFIED_SHEPP_LOGAN
        .iter()
        .map(|e| {
            let (s, c) = e.angle_deg.to_radians().sin_cos();
            (e, c, s, e.semi_x * e.semi_x, e.semi_y * e.semi_y)
        })
        .collect();

    let mut values = Vec::with_capacity(n * n);
    for r in 0..n {
        let y = -coord(r);
        for col in 0..n {
            let x = coord(col);
            let mut v = 0.0;
            for (e, cos, sin, a2, b2) in &prepared {
                let dx = x - e.center.0;
                let dy = y - e.center.1;
                let u = dx * cos + dy * sin;
                let w = dy * cos - dx * sin;
                if u * u / a2 + w * w / b2 <= 1.0 {
                    v += e.intensity;
                }
            }
            values.push(v.clamp(0.0, 1.0));
        }
    }
    Signal::new(Topology::grid(n, n)?, values)
}
