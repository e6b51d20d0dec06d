use serde::{Deserialize, Serialize};
use std::io::Write;

use super::{ComplexPair, NahmError, NahmQuadruple, TrialRecord};
use crate::linalg::{from_pairs, to_pairs, CMat};

type Wire = Vec<[f64; 2]>;

/// `{"n", "M", "T": [4][M+1] matrices}`, row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NahmJson {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<Wire>>,
}

/// `{"n", "M", "alpha", "beta"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub alpha: Vec<Wire>,
    pub beta: Vec<Wire>,
}

fn decode(n: usize, m: usize, what: &str, samples: &[Wire]) -> Result<Vec<CMat>, NahmError> {
    if samples.len() != m + 1 {
        return Err(NahmError::Format(format!(
            "{what}: expected {} samples, found {}",
            m + 1,
            samples.len()
        )));
    }
    samples
        .iter()
        .map(|s| from_pairs(n, n, s).map_err(|e| NahmError::Format(format!("{what}: {e}"))))
        .collect()
}

impl From<&NahmQuadruple> for NahmJson {
    fn from(t: &NahmQuadruple) -> Self {
        Self {
            n: t.dim(),
            m: t.intervals(),
            t: (0..4).map(|a| t.component(a).iter().map(to_pairs).collect()).collect(),
        }
    }
}

impl TryFrom<NahmJson> for NahmQuadruple {
    type Error = NahmError;

    fn try_from(j: NahmJson) -> Result<Self, NahmError> {
        if j.t.len() != 4 {
            return Err(NahmError::Format(format!("T needs 4 components, found {}", j.t.len())));
        }
        let mut comps = Vec::with_capacity(4);
        for (a, c) in j.t.iter().enumerate() {
            comps.push(decode(j.n, j.m, &format!("T{a}"), c)?);
        }
        let comps: [Vec<CMat>; 4] = comps.try_into().expect("four components");
        NahmQuadruple::new(comps)
    }
}

impl From<&ComplexPair> for PairJson {
    fn from(p: &ComplexPair) -> Self {
        Self {
            n: p.dim(),
            m: p.intervals(),
            alpha: p.alpha.iter().map(to_pairs).collect(),
            beta: p.beta.iter().map(to_pairs).collect(),
        }
    }
}

impl TryFrom<PairJson> for ComplexPair {
    type Error = NahmError;

    fn try_from(j: PairJson) -> Result<Self, NahmError> {
        ComplexPair::new(decode(j.n, j.m, "alpha", &j.alpha)?, decode(j.n, j.m, "beta", &j.beta)?)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.6e}"))
}

fn tag(x: Option<super::GrowthTag>) -> String {
    x.map_or_else(|| "ambiguous".into(), |t| t.to_string())
}

/// Trial CSV followed by a `summary` row holding the agreement rate among
/// margin-passing trials in the `fit_rate` column.
pub fn write_trials_csv<W: Write>(records: &[TrialRecord], w: W) -> Result<f64, csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "trial",
        "seed",
        "n",
        "class_numeric",
        "class_analytic",
        "fit_rate",
        "fit_a2",
        "margin_flags",
    ])?;
    for r in records {
        out.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            tag(r.class_numeric),
            tag(r.class_analytic),
            opt(r.fit_rate),
            opt(r.fit_a2),
            r.margin_flags.join("|"),
        ])?;
    }
    let passing: Vec<&TrialRecord> = records.iter().filter(|r| r.passes_margins()).collect();
    let agree = passing.iter().filter(|r| r.agrees()).count();
    let rate = if passing.is_empty() {
        1.0
    } else {
        agree as f64 / passing.len() as f64
    };
    out.write_record([
        "summary".to_string(),
        String::new(),
        String::new(),
        format!("passing={}", passing.len()),
        format!("agree={agree}"),
        format!("{rate:.6}"),
        String::new(),
        format!("excluded={}", records.len() - passing.len()),
    ])?;
    out.flush()?;
    Ok(rate)
}
