use serde::{Deserialize, Serialize};

use super::{ADHMData, AdhmError, CRow, PointConfig};
use crate::linalg::{c, from_pairs, to_pairs, CVec};

/// `{"n", "X", "Y", "i", "j"}` with row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdhmJson {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Vec<[f64; 2]>,
    #[serde(rename = "Y")]
    pub y: Vec<[f64; 2]>,
    pub i: Vec<[f64; 2]>,
    pub j: Vec<[f64; 2]>,
}

/// A list of `[x_re, x_im, y_re, y_im]`.
pub type PointsJson = Vec<[f64; 4]>;

impl From<&ADHMData> for AdhmJson {
    fn from(d: &ADHMData) -> Self {
        Self {
            n: d.dim(),
            x: to_pairs(&d.x),
            y: to_pairs(&d.y),
            i: d.i.iter().map(|z| [z.re, z.im]).collect(),
            j: d.j.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<AdhmJson> for ADHMData {
    type Error = AdhmError;

    fn try_from(j: AdhmJson) -> Result<Self, AdhmError> {
        let mat =
            |v: &[[f64; 2]], name: &str| from_pairs(j.n, j.n, v).map_err(|e| AdhmError::Format(format!("{name}: {e}")));
        let vec = |v: &[[f64; 2]], name: &str| {
            if v.len() != j.n {
                return Err(AdhmError::Format(format!(
                    "{name}: expected {} entries, found {}",
                    j.n,
                    v.len()
                )));
            }
            Ok(v.iter().map(|p| c(p[0], p[1])).collect::<Vec<_>>())
        };
        ADHMData::new(
            mat(&j.x, "X")?,
            mat(&j.y, "Y")?,
            CVec::from_vec(vec(&j.i, "i")?),
            CRow::from_vec(vec(&j.j, "j")?),
        )
    }
}

impl PointConfig {
    pub fn to_json(&self) -> PointsJson {
        self.points().iter().map(|(x, y)| [x.re, x.im, y.re, y.im]).collect()
    }

    pub fn from_json(p: &PointsJson) -> Result<Self, AdhmError> {
        Self::new(p.iter().map(|q| (c(q[0], q[1]), c(q[2], q[3]))).collect())
    }
}
