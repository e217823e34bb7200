//! The CIEDE2000 color difference.

use crate::color::LabPoint;

const POW25_7: f64 = 6_103_515_625.0;

/// Computes the CIEDE2000 difference between two CIELAB points with the
/// parametric factors kL = kC = kH = 1.
///
/// The result is symmetric, zero between identical points, and positive
/// otherwise. It is not a metric: the triangle inequality does not hold.
pub fn ciede2000(p: LabPoint, q: LabPoint) -> f64 {
    let c1 = (p.a * p.a + p.b * p.b).sqrt();
    let c2 = (q.a * q.a + q.b * q.b).sqrt();
    let c_bar7 = (0.5 * (c1 + c2)).powi(7);
    let g = 0.5 * (1.0 - (c_bar7 / (c_bar7 + POW25_7)).sqrt());

    let a1p = (1.0 + g) * p.a;
    let a2p = (1.0 + g) * q.a;
    let c1p = (a1p * a1p + p.b * p.b).sqrt();
    let c2p = (a2p * a2p + q.b * q.b).sqrt();
    let h1p = hue_angle(p.b, a1p);
    let h2p = hue_angle(q.b, a2p);

    let dl = q.l - p.l;
    let dc = c2p - c1p;
    // Hue difference is undefined without chroma on both sides.
    let dhp = if c1p * c2p == 0.0 {
        0.0
    } else {
        let diff = h2p - h1p;
        if diff > 180.0 {
            diff - 360.0
        } else if diff < -180.0 {
            diff + 360.0
        } else {
            diff
        }
    };
    let dh = 2.0 * (c1p * c2p).sqrt() * (dhp / 2.0).to_radians().sin();

    let l_bar = 0.5 * (p.l + q.l);
    let cp_bar = 0.5 * (c1p + c2p);
    let hp_bar = if c1p * c2p == 0.0 {
        h1p + h2p
    } else if (h1p - h2p).abs() <= 180.0 {
        0.5 * (h1p + h2p)
    } else if h1p + h2p < 360.0 {
        0.5 * (h1p + h2p + 360.0)
    } else {
        0.5 * (h1p + h2p - 360.0)
    };

    let t = 1.0 - 0.17 * (hp_bar - 30.0).to_radians().cos()
        + 0.24 * (2.0 * hp_bar).to_radians().cos()
        + 0.32 * (3.0 * hp_bar + 6.0).to_radians().cos()
        - 0.20 * (4.0 * hp_bar - 63.0).to_radians().cos();

    let l_dev = (l_bar - 50.0) * (l_bar - 50.0);
    let sl = 1.0 + 0.015 * l_dev / (20.0 + l_dev).sqrt();
    let sc = 1.0 + 0.045 * cp_bar;
    let sh = 1.0 + 0.015 * cp_bar * t;

    let d_theta = 30.0 * (-((hp_bar - 275.0) / 25.0) * ((hp_bar - 275.0) / 25.0)).exp();
    let cp_bar7 = cp_bar.powi(7);
    let rt = -2.0 * (cp_bar7 / (cp_bar7 + POW25_7)).sqrt() * (2.0 * d_theta).to_radians().sin();

    let vl = dl / sl;
    let vc = dc / sc;
    let vh = dh / sh;
    (vl * vl + vc * vc + vh * vh + rt * vc * vh).sqrt()
}

/// Hue angle in degrees within [0, 360); zero for the achromatic origin.
fn hue_angle(b: f64, ap: f64) -> f64 {
    if b == 0.0 && ap == 0.0 {
        return 0.0;
    }
    let h = b.atan2(ap).to_degrees();
    if h < 0.0 {
        h + 360.0
    } else {
        h
    }
}
