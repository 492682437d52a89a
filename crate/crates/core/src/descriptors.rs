//! Shape descriptors of a novelty trajectory.
//!
//! * speed: mean absolute first difference
//! * volume: population standard deviation
//! * circuitousness: path length over net displacement (`None` when the net
//!   displacement is below [`MIN_DISPLACEMENT`])
//! * PAA: fractional-weight piecewise aggregate approximation
//! * SAX: letters from equiprobable Gaussian bins of the z-normalized PAA
//! * curve class: sign of the OLS slope against position in `[0, 1]`

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SEGMENTS: usize = 16;
pub const DEFAULT_ALPHABET: usize = 5;
pub const DEFAULT_EPSILON: f64 = 0.02;
pub const MIN_DISPLACEMENT: f64 = 1e-9;
/// PAA vectors with a smaller standard deviation map to the middle letter.
pub const SAX_FLAT_STD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveClass {
    Red,
    Blue,
    Green,
}

impl CurveClass {
    pub const ALL: [CurveClass; 3] = [CurveClass::Red, CurveClass::Blue, CurveClass::Green];

    pub fn name(self) -> &'static str {
        match self {
            CurveClass::Red => "Red",
            CurveClass::Blue => "Blue",
            CurveClass::Green => "Green",
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "red" => Ok(CurveClass::Red),
            "blue" => Ok(CurveClass::Blue),
            "green" => Ok(CurveClass::Green),
            _ => Err(Error::Config(format!("unknown curve class `{s}`"))),
        }
    }
}

/// Slope threshold separating trends from flat trajectories, in novelty
/// units over the whole book.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveThreshold(f64);

impl CurveThreshold {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(Self(epsilon))
        } else {
            Err(Error::Config(format!("curve epsilon must be positive, got {epsilon}")))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

impl Default for CurveThreshold {
    fn default() -> Self {
        Self(DEFAULT_EPSILON)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorParams {
    pub segments: usize,
    pub alphabet: usize,
    pub threshold: CurveThreshold,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            segments: DEFAULT_SEGMENTS,
            alphabet: DEFAULT_ALPHABET,
            threshold: CurveThreshold::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDescriptors {
    pub speed: f64,
    pub volume: f64,
    /// `None` when the net displacement is zero.
    pub circuitousness: Option<f64>,
    /// `None` when the trajectory is shorter than the segment count.
    pub paa: Option<Vec<f64>>,
    pub sax: Option<String>,
    pub curve: CurveClass,
    pub slope: f64,
}

/// Computes every descriptor. Requires at least two values.
pub fn describe(values: &[f64], params: &DescriptorParams) -> Result<TrajectoryDescriptors> {
    let (curve, slope) = classify_curve(values, params.threshold)?;
    let paa = match paa(values, params.segments) {
        Ok(p) => Some(p),
        Err(Error::TooShort { .. }) => None,
        Err(e) => return Err(e),
    };
    let sax = paa.as_deref().map(|p| sax(p, params.alphabet));
    Ok(TrajectoryDescriptors {
        speed: speed(values),
        volume: volume(values),
        circuitousness: circuitousness(values)?,
        paa,
        sax,
        curve,
        slope,
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn speed(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    path_length(values) / (values.len() - 1) as f64
}

fn path_length(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Population standard deviation (Welford).
pub fn volume(values: &[f64]) -> f64 {
    let mut count = 0.0;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for &v in values {
        count += 1.0;
        let delta = v - mean;
        mean += delta / count;
        m2 += delta * (v - mean);
    }
    if count < 2.0 {
        return 0.0;
    }
    (m2 / count).max(0.0).sqrt()
}

pub fn circuitousness(values: &[f64]) -> Result<Option<f64>> {
    if values.len() < 2 {
        return Err(Error::TooShort { needed: 2, actual: values.len() });
    }
    let net = (values[values.len() - 1] - values[0]).abs();
    if net < MIN_DISPLACEMENT {
        return Ok(None);
    }
    let non_decreasing = values.windows(2).all(|w| w[1] >= w[0]);
    let non_increasing = values.windows(2).all(|w| w[1] <= w[0]);
    if non_decreasing || non_increasing {
        return Ok(Some(1.0));
    }
    Ok(Some(path_length(values) / net))
}

/// Fractional-weight PAA.
///
/// The index axis `[0, n)` is cut into `segments` equal intervals and each
/// output is the overlap-weighted mean of the points in its interval. Scaled
/// by `segments`, all interval and point boundaries are integers, so the
/// weights are exact.
pub fn paa(values: &[f64], segments: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if segments == 0 || n < segments {
        return Err(Error::TooShort { needed: segments.max(1), actual: n });
    }
    let (n_u, s_u) = (n as u128, segments as u128);
    let out = (0..s_u)
        .map(|j| {
            // interval [j*n, (j+1)*n), point i covers [i*S, (i+1)*S)
            let lo = j * n_u;
            let hi = (j + 1) * n_u;
            let first = (lo / s_u) as usize;
            let last = ((hi - 1) / s_u) as usize;
            let weighted: f64 = (first..=last)
                .map(|i| {
                    let p_lo = i as u128 * s_u;
                    let p_hi = p_lo + s_u;
                    let overlap = hi.min(p_hi) - lo.max(p_lo);
                    overlap as f64 * values[i]
                })
                .sum();
            weighted / n as f64
        })
        .collect();
    Ok(out)
}

/// Inverse standard-normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    assert!(p > 0.0 && p < 1.0, "probability must be in (0, 1)");
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// Equiprobable Gaussian breakpoints `Φ⁻¹(i / alphabet)` for `i = 1..alphabet`.
pub fn sax_breakpoints(alphabet: usize) -> Vec<f64> {
    assert!((2..=26).contains(&alphabet), "alphabet size must be in [2, 26]");
    (1..alphabet)
        .map(|i| {
            let p = i as f64 / alphabet as f64;
            // exact symmetry around the median
            if 2 * i == alphabet {
                0.0
            } else if 2 * i > alphabet {
                -inverse_normal_cdf((alphabet - i) as f64 / alphabet as f64)
            } else {
                inverse_normal_cdf(p)
            }
        })
        .collect()
}

/// SAX word of a PAA vector.
///
/// The vector is z-normalized with its own mean and population std; values
/// on a breakpoint fall into the higher bin. A flat vector maps to the
/// middle letter (left of centre for even alphabets).
pub fn sax(paa: &[f64], alphabet: usize) -> String {
    assert!(!paa.is_empty(), "SAX input must be non-empty");
    let breakpoints = sax_breakpoints(alphabet);
    let mu = mean(paa);
    let sigma = (paa.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / paa.len() as f64).sqrt();
    if sigma < SAX_FLAT_STD {
        let middle = (b'a' + ((alphabet - 1) / 2) as u8) as char;
        return std::iter::repeat_n(middle, paa.len()).collect();
    }
    paa.iter()
        .map(|v| {
            let z = (v - mu) / sigma;
            let bin = breakpoints.iter().take_while(|&&b| z >= b).count();
            (b'a' + bin as u8) as char
        })
        .collect()
}

/// OLS slope of novelty against position `i / (n - 1)`, and its class.
pub fn classify_curve(values: &[f64], threshold: CurveThreshold) -> Result<(CurveClass, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, actual: n });
    }
    let span = (n - 1) as f64;
    let x_mean = 0.5;
    let y_mean = mean(values);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 / span - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    let eps = threshold.epsilon();
    let class = if slope > eps {
        CurveClass::Red
    } else if slope < -eps {
        CurveClass::Blue
    } else {
        CurveClass::Green
    };
    Ok((class, slope))
}
