//! Versioned JSON files holding a sharing scheme.
//!
//! `x` and `y` are the real and imaginary parts of the interferometer
//! unitary, row-major. Floats are written in the shortest form that parses
//! back to the same value, so save-load-save is byte-identical.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::sharing::SharingScheme;
use crate::symplectic::PassiveInterferometer;
use crate::{Error, Result, DEFAULT_TOL};

pub const FORMAT_VERSION: u32 = 1;

/// Unitarity tolerance for the published fixtures, which are rounded to six
/// significant digits.
pub const FIXTURE_TOL: f64 = 5e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Fixture { name: String },
    Sample { seed: u64, method: String },
    Search { seed: u64, method: String, samples: usize, index: usize, criterion: String, score: f64 },
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub format_version: u32,
    pub n: usize,
    pub m: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub tolerance: f64,
    pub provenance: Provenance,
}

fn row_major(a: &DMatrix<f64>) -> Vec<f64> {
    a.transpose().as_slice().to_vec()
}

impl SchemeFile {
    pub fn from_scheme(scheme: &SharingScheme, tolerance: f64, provenance: Provenance) -> Self {
        let u = scheme.interferometer();
        Self {
            format_version: FORMAT_VERSION,
            n: scheme.ancillas(),
            m: scheme.secret_modes(),
            x: row_major(u.x()),
            y: row_major(u.y()),
            tolerance,
            provenance,
        }
    }

    /// Validate and build the scheme.
    pub fn to_scheme(&self) -> Result<SharingScheme> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let total = self.n + self.m;
        if self.x.len() != total * total || self.y.len() != total * total {
            return Err(Error::Dimension(format!(
                "x and y need {} entries each for n + m = {total}, got {} and {}",
                total * total,
                self.x.len(),
                self.y.len()
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1e-2) {
            return Err(Error::Validation(format!("tolerance {} is out of range", self.tolerance)));
        }
        let x = DMatrix::from_row_slice(total, total, &self.x);
        let y = DMatrix::from_row_slice(total, total, &self.y);
        let u = PassiveInterferometer::with_tolerance(x, y, self.tolerance)?;
        SharingScheme::new(self.n, self.m, u)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub const FIXTURE_NAMES: [&str; 4] = ["m1n2bad", "m1n2good", "m1n4", "m2n2"];

#[rustfmt::skip]
const M1N2BAD_X: [f64; 9] = [
    -0.293099, -0.803506, -0.311073,
    0.128259, -0.376779, 0.463209,
    -0.633935, -0.0662967, 0.145639,
];
#[rustfmt::skip]
const M1N2BAD_Y: [f64; 9] = [
    0.0921935, 0.16507, 0.368724,
    0.650109, -0.23828, -0.384196,
    -0.254222, 0.352131, -0.619594,
];
#[rustfmt::skip]
const M1N2GOOD_X: [f64; 9] = [
    0.596667, 0.175214, 0.100266,
    0.108915, 0.458534, -0.680759,
    0.426961, -0.608681, -0.134113,
];
#[rustfmt::skip]
const M1N2GOOD_Y: [f64; 9] = [
    -0.0698255, 0.405573, 0.658688,
    -0.457902, 0.174213, -0.272814,
    -0.485058, -0.440131, 0.0151496,
];
#[rustfmt::skip]
const M1N4_X: [f64; 25] = [
    0.300365, 0.29053, -0.291467, 0.497589, -0.0499837,
    0.0193436, -0.0889674, -0.576899, 0.216171, -0.181089,
    0.068743, -0.627185, 0.0456175, 0.267772, 0.488823,
    0.313121, -0.292716, 0.202423, -0.254404, -0.472559,
    0.591341, 0.0132897, -0.118776, -0.45464, 0.0190248,
];
#[rustfmt::skip]
const M1N4_Y: [f64; 25] = [
    0.312353, -0.285854, 0.469979, 0.285289, -0.0937025,
    0.0839586, -0.117954, -0.320784, -0.442078, 0.509978,
    0.445916, -0.00774418, -0.243163, 0.0854139, -0.15446,
    0.382669, 0.26366, 0.163123, 0.252382, 0.425447,
    -0.0840343, -0.513083, -0.339929, 0.121405, -0.16842,
];
#[rustfmt::skip]
const M2N2_X: [f64; 16] = [
    -0.17138, 0.363352, 0.220969, 0.0345219,
    0.158628, -0.268691, 0.342882, -0.0159773,
    0.478503, -0.474253, -0.255255, 0.12308,
    -0.435812, -0.0371908, 0.0669927, -0.343434,
];
#[rustfmt::skip]
const M2N2_Y: [f64; 16] = [
    -0.529669, -0.40525, 0.435797, 0.392287,
    0.460908, 0.266619, 0.628541, 0.325934,
    -0.130468, -0.312016, -0.235265, 0.544141,
    -0.128694, 0.486635, -0.351609, 0.556099,
];

/// One of the published example interferometers, verbatim.
pub fn fixture(name: &str) -> Result<SchemeFile> {
    let (n, m, x, y): (usize, usize, &[f64], &[f64]) = match name {
        "m1n2bad" => (2, 1, &M1N2BAD_X, &M1N2BAD_Y),
        "m1n2good" => (2, 1, &M1N2GOOD_X, &M1N2GOOD_Y),
        "m1n4" => (4, 1, &M1N4_X, &M1N4_Y),
        "m2n2" => (2, 2, &M2N2_X, &M2N2_Y),
        _ => {
            return Err(Error::Unknown {
                kind: "fixture",
                name: name.to_string(),
                available: FIXTURE_NAMES.join(", "),
            })
        }
    };
    Ok(SchemeFile {
        format_version: FORMAT_VERSION,
        n,
        m,
        x: x.to_vec(),
        y: y.to_vec(),
        tolerance: FIXTURE_TOL,
        provenance: Provenance::Fixture { name: name.to_string() },
    })
}

/// A freshly sampled scheme in file form.
pub fn sampled(scheme: &SharingScheme, seed: u64, method: &str) -> SchemeFile {
    SchemeFile::from_scheme(scheme, DEFAULT_TOL, Provenance::Sample { seed, method: method.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_verbatim_and_valid() {
        assert_eq!(fixture("m1n2bad").unwrap().x[0], -0.293099);
        assert_eq!(fixture("m1n2good").unwrap().x[0], 0.596667);
        assert_eq!(fixture("m2n2").unwrap().y[0], -0.529669);
        for name in FIXTURE_NAMES {
            let f = fixture(name).unwrap();
            let s = f.to_scheme().unwrap();
            assert_eq!((s.ancillas(), s.secret_modes()), (f.n, f.m));
        }
        assert!(fixture("m3n3").is_err());
    }

    #[test]
    fn json_keeps_six_digits() {
        let text = fixture("m1n2bad").unwrap().to_json().unwrap();
        assert!(text.contains("-0.0662967"));
        assert!(text.contains("\"kind\": \"fixture\""));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let f = fixture("m1n4").unwrap();
        let a = f.to_json().unwrap();
        let b = SchemeFile::from_json(&a).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_files() {
        let mut f = fixture("m1n2good").unwrap();
        f.x.pop();
        assert!(f.to_scheme().is_err());
        let mut f = fixture("m1n2good").unwrap();
        f.tolerance = 1e-12;
        assert!(f.to_scheme().is_err());
        let mut f = fixture("m1n2good").unwrap();
        f.format_version = 9;
        assert!(f.to_scheme().is_err());
        assert!(SchemeFile::from_json("{\"n\": 1}").is_err());
    }
}
