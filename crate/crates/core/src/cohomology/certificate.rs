use indexmap::IndexMap;
use serde::Serialize;

use super::{
    fiber_fixed_character, fiber_fixed_components, partitions, CharacterVector, CohomologyError, FixedComponentReport,
    Poly,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReasoningStep {
    pub step: usize,
    pub claim: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KirwanCertificate {
    pub n: usize,
    pub per_partition: Vec<FixedComponentReport>,
    pub character: CharacterVector,
    pub nontrivial_present: bool,
    pub regular_rep_present: bool,
    pub surjectivity_contradicted: bool,
    /// Index into `per_partition` of the report carrying the regular
    /// representation.
    pub regular_rep_witness: Option<usize>,
    pub reasoning: Vec<ReasoningStep>,
}

const REMARK: &str = "Degree shifts of the Bialynicki-Birula strata are ignored and q tracks only \
the cohomological degree on fixed components. Compatibility with Hodge weights is not computed.";

/// Evaluate the fixed-locus obstruction for `n` points.
///
/// The `λ = (n)` stratum has `n` components permuted freely and transitively
/// by `μ_n`, which puts the regular representation in the fixed-locus
/// cohomology; any nontrivial character there cannot come from a source on
/// which `μ_n` acts trivially.
pub fn kirwan_certificate(n: usize) -> Result<KirwanCertificate, CohomologyError> {
    let per_partition = partitions(n)
        .iter()
        .map(|l| fiber_fixed_components(l, n))
        .collect::<Result<Vec<_>, _>>()?;
    let character = fiber_fixed_character(n)?;
    let nontrivial_present = character.coefficients.iter().skip(1).any(|p| !p.is_zero());
    let regular_rep_witness = per_partition.iter().position(|r| {
        r.partition.parts() == [n]
            && r.d == n
            && r.free
            && CharacterVector::of_report(n, r)
                .coefficients
                .iter()
                .all(|p| *p == Poly::one())
    });
    let regular_rep_present = regular_rep_witness.is_some() && character.contains_regular();
    let surjectivity_contradicted = nontrivial_present && regular_rep_present;
    let reasoning = vec![
        ReasoningStep {
            step: 1,
            claim: "the mu_n-action on the source extends to a connected C*-action, so mu_n acts trivially on source cohomology",
            holds: true,
        },
        ReasoningStep {
            step: 2,
            claim: "the Bialynicki-Birula splitting of the quotient cohomology onto fixed components is mu_n-equivariant",
            holds: true,
        },
        ReasoningStep {
            step: 3,
            claim: "a nontrivial mu_n-isotypic piece in fixed-component cohomology lies outside the image of a surjective Kirwan map",
            holds: nontrivial_present,
        },
    ];
    Ok(KirwanCertificate {
        n,
        per_partition,
        character,
        nontrivial_present,
        regular_rep_present,
        surjectivity_contradicted,
        regular_rep_witness,
        reasoning,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionJson {
    pub parts: Vec<usize>,
    pub m: usize,
    pub d: usize,
    pub components: usize,
    pub poincare: Poly,
    #[serde(rename = "gammaShift")]
    pub gamma_shift: usize,
    pub free: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateJson {
    pub n: usize,
    pub partitions: Vec<PartitionJson>,
    pub character: IndexMap<String, Poly>,
    pub nontrivial_present: bool,
    pub regular_rep_present: bool,
    pub surjectivity_contradicted: bool,
    pub regular_rep_witness: Option<Vec<usize>>,
    pub reasoning: Vec<ReasoningStep>,
    pub remark: &'static str,
}

impl From<&KirwanCertificate> for CertificateJson {
    fn from(c: &KirwanCertificate) -> Self {
        Self {
            n: c.n,
            partitions: c
                .per_partition
                .iter()
                .map(|r| PartitionJson {
                    parts: r.partition.parts().to_vec(),
                    m: r.m,
                    d: r.d,
                    components: r.num_components,
                    poincare: r.component_poincare.clone(),
                    gamma_shift: r.gamma_shift,
                    free: r.free,
                })
                .collect(),
            character: c
                .character
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, p)| (k.to_string(), p.clone()))
                .collect(),
            nontrivial_present: c.nontrivial_present,
            regular_rep_present: c.regular_rep_present,
            surjectivity_contradicted: c.surjectivity_contradicted,
            regular_rep_witness: c
                .regular_rep_witness
                .map(|k| c.per_partition[k].partition.parts().to_vec()),
            reasoning: c.reasoning.clone(),
            remark: REMARK,
        }
    }
}
