use serde::{Deserialize, Serialize};
use std::io::Write;

use super::{EigenPathBundle, HermitianFamily, SpectralError};
use crate::linalg::{from_pairs, to_pairs};

/// Wire form of a polynomial family: `coefficients[k]` is `C_k` flattened
/// row-major into `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: usize,
    pub degree: usize,
    pub coefficients: Vec<Vec<[f64; 2]>>,
}

impl From<&HermitianFamily> for FamilyJson {
    fn from(f: &HermitianFamily) -> Self {
        Self {
            n: f.dim(),
            degree: f.degree(),
            coefficients: f.coefficients().iter().map(to_pairs).collect(),
        }
    }
}

impl TryFrom<FamilyJson> for HermitianFamily {
    type Error = SpectralError;

    fn try_from(j: FamilyJson) -> Result<Self, SpectralError> {
        if j.coefficients.len() != j.degree + 1 {
            return Err(SpectralError::Format(format!(
                "degree {} needs {} coefficients, found {}",
                j.degree,
                j.degree + 1,
                j.coefficients.len()
            )));
        }
        let mats = j
            .coefficients
            .iter()
            .map(|c| from_pairs(j.n, j.n, c).map_err(|e| SpectralError::Format(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        HermitianFamily::new(mats)
    }
}

impl EigenPathBundle {
    /// Long-format CSV: one row per grid point and path with columns
    /// `t, i, eta, v0_re, v0_im, …`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let n = self.dim();
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string(), "i".into(), "eta".into()];
        for k in 0..n {
            header.push(format!("v{k}_re"));
            header.push(format!("v{k}_im"));
        }
        out.write_record(&header)?;
        for (s, &t) in self.grid.iter().enumerate() {
            for i in 0..n {
                let mut row = vec![format!("{t:e}"), i.to_string(), format!("{:e}", self.values[s][i])];
                for k in 0..n {
                    let z = self.vectors[s][(k, i)];
                    row.push(format!("{:e}", z.re));
                    row.push(format!("{:e}", z.im));
                }
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}
