//! Color representations and conversions between sRGB, hex codes, and CIELAB.
//!
//! All conversions assume the sRGB color space (IEC 61966-2-1) with the D65
//! reference white and the 2 degree standard observer.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced when parsing color values.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorError {
    /// The input is not a six-digit hex color code.
    #[error("malformed hex code {input:?}: {reason}")]
    MalformedHex { input: String, reason: String },
}

/// An 8-bit-per-channel sRGB color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RgbColor {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl RgbColor {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        RgbColor { r, g, b }
    }

    /// The canonical hex code for this color.
    pub fn hex(self) -> HexCode {
        HexCode(format!("{:02x}{:02x}{:02x}", self.r, self.g, self.b))
    }
}

impl fmt::Display for RgbColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.g, self.b)
    }
}

/// A validated six-digit hex color code, stored lowercase without the `#`.
///
/// `Display` prepends `#`, which is the canonical output form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HexCode(String);

impl HexCode {
    /// Parses a hex code. A leading `#` is optional and letter case is
    /// ignored; anything other than exactly six hex digits is rejected.
    pub fn parse(input: &str) -> Result<Self, ColorError> {
        let digits = input.strip_prefix('#').unwrap_or(input);
        let count = digits.chars().count();
        if count != 6 {
            return Err(ColorError::MalformedHex {
                input: input.to_string(),
                reason: format!("expected 6 hex digits, found {count}"),
            });
        }
        if let Some(bad) = digits.chars().find(|c| !c.is_ascii_hexdigit()) {
            return Err(ColorError::MalformedHex {
                input: input.to_string(),
                reason: format!("invalid hex digit {bad:?}"),
            });
        }
        Ok(HexCode(digits.to_ascii_lowercase()))
    }

    /// The six digits without the `#` prefix.
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Decodes the three channels.
    pub fn rgb(&self) -> RgbColor {
        let byte = |i: usize| u8::from_str_radix(&self.0[2 * i..2 * i + 2], 16).unwrap();
        RgbColor::new(byte(0), byte(1), byte(2))
    }
}

impl fmt::Display for HexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl From<RgbColor> for HexCode {
    fn from(c: RgbColor) -> Self {
        c.hex()
    }
}

/// Parses a hex code directly to its color.
pub fn parse_hex(input: &str) -> Result<RgbColor, ColorError> {
    Ok(HexCode::parse(input)?.rgb())
}

/// A point in CIELAB space.
///
/// For colors converted from [`RgbColor`], `l` lies in [0, 100] and `a`, `b`
/// roughly in [-128, 128]. Coordinates are finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabPoint {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabPoint {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        LabPoint { l, a, b }
    }
}

/// Linear sRGB to XYZ, D65 white, derived at full precision from the
/// IEC 61966-2-1 chromaticities.
const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.41239079926595934, 0.357584339383878, 0.1804807884018343],
    [0.21263900587151027, 0.715168678767756, 0.07219231536073371],
    [0.01933081871559182, 0.11919477979462598, 0.9505321522496607],
];

// Published digits kept verbatim even where one exceeds f64 precision.
#[allow(clippy::excessive_precision)]
const XYZ_TO_SRGB: [[f64; 3]; 3] = [
    [3.2409699419045226, -1.5373831775700939, -0.49861076029300334],
    [-0.9692436362808796, 1.8759675015077202, 0.04155505740717562],
    [0.05563007969699364, -0.20397695888897652, 1.0569715142428784],
];

/// Reference white, defined as the XYZ of sRGB (255, 255, 255) under
/// [`SRGB_TO_XYZ`] so the gray axis maps to a = b = 0 exactly.
const WHITE: [f64; 3] = [
    SRGB_TO_XYZ[0][0] + SRGB_TO_XYZ[0][1] + SRGB_TO_XYZ[0][2],
    SRGB_TO_XYZ[1][0] + SRGB_TO_XYZ[1][1] + SRGB_TO_XYZ[1][2],
    SRGB_TO_XYZ[2][0] + SRGB_TO_XYZ[2][1] + SRGB_TO_XYZ[2][2],
];

/// (6/29)^3, the CIE L* linearity threshold.
const LAB_EPSILON: f64 = 216.0 / 24389.0;
/// (29/3)^3, the CIE L* linear segment slope.
const LAB_KAPPA: f64 = 24389.0 / 27.0;

fn srgb_decode(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn srgb_encode(c: f64) -> f64 {
    if c <= 0.0031308 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        (LAB_KAPPA * t + 16.0) / 116.0
    }
}

fn lab_f_inv(u: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if u > DELTA {
        u * u * u
    } else {
        (116.0 * u - 16.0) / LAB_KAPPA
    }
}

/// Converts an sRGB color to CIELAB.
pub fn rgb_to_lab(c: RgbColor) -> LabPoint {
    let lin = [
        srgb_decode(c.r as f64 / 255.0),
        srgb_decode(c.g as f64 / 255.0),
        srgb_decode(c.b as f64 / 255.0),
    ];
    let xyz: Vec<f64> = SRGB_TO_XYZ
        .iter()
        .map(|row| row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2])
        .collect();
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    LabPoint::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// Converts a CIELAB point to the nearest representable sRGB color.
///
/// Out-of-gamut channels are clamped; in-gamut channels round half away
/// from zero, so `lab_to_rgb(rgb_to_lab(c)) == c` for every `RgbColor`.
pub fn lab_to_rgb(p: LabPoint) -> RgbColor {
    let fy = (p.l + 16.0) / 116.0;
    let fx = fy + p.a / 500.0;
    let fz = fy - p.b / 200.0;
    let xyz = [
        lab_f_inv(fx) * WHITE[0],
        lab_f_inv(fy) * WHITE[1],
        lab_f_inv(fz) * WHITE[2],
    ];
    let channel = |row: &[f64; 3]| {
        let lin = (row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2]).clamp(0.0, 1.0);
        (srgb_encode(lin) * 255.0).round() as u8
    };
    RgbColor::new(
        channel(&XYZ_TO_SRGB[0]),
        channel(&XYZ_TO_SRGB[1]),
        channel(&XYZ_TO_SRGB[2]),
    )
}
