//! JSON instance files.
//!
//! Complex numbers are `[re, im]`, matrices are lists of rows, and subspaces or
//! maps are lists of vectors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::{construct_triplet, BoundaryTriplet, IsometryInstance};
use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::relation::LinearRelation;
use crate::space::PontryaginSpace;

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;
pub type JsonVectors = Vec<Vec<JsonComplex>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dim: usize,
    pub gram: JsonMatrix,
}

/// `V` as images of domain vectors: `V domain[k] = images[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub domain: JsonVectors,
    pub images: JsonVectors,
}

/// Boundary maps as `dim 𝔑ⱼ × 2n` matrices acting on `(f; f')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletSpec {
    pub n1_gram: JsonMatrix,
    pub n2_gram: JsonMatrix,
    pub gamma1: JsonMatrix,
    pub gamma2: JsonMatrix,
}

/// A parameter `τ` from `𝔑₂` to `𝔑₁`, spanned by stacked vectors `(h₂; h₁)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub spanning: JsonVectors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColligationSpec {
    pub state_gram: JsonMatrix,
    pub u: JsonMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub space: SpaceSpec,
    pub v: MapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triplet: Option<TripletSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<TauSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colligation: Option<ColligationSpec>,
}

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Columns of `m` as vectors.
pub fn columns_to_json(m: &CMat) -> JsonVectors {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, what: &str) -> Result<CMat> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Schema(format!("{what}: ragged rows")));
    }
    Ok(CMat::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

/// Vectors of length `len` as the columns of a matrix.
pub fn columns_from_json(vectors: &JsonVectors, len: usize, what: &str) -> Result<CMat> {
    if let Some(bad) = vectors.iter().position(|v| v.len() != len) {
        return Err(Error::Schema(format!(
            "{what}: vector {bad} has length {}, expected {len}",
            vectors[bad].len()
        )));
    }
    Ok(CMat::from_fn(len, vectors.len(), |i, j| {
        C64::new(vectors[j][i][0], vectors[j][i][1])
    }))
}

fn square(m: &CMat, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Schema(format!(
            "{what}: expected {n}x{n}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn space_from(gram: &JsonMatrix, what: &str) -> Result<PontryaginSpace> {
    let g = matrix_from_json(gram, what)?;
    square(&g, g.nrows(), what)?;
    PontryaginSpace::new(g)
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// File contents for an instance, with an optional triplet override.
    pub fn from_instance(inst: &IsometryInstance, seed: Option<u64>) -> Self {
        let n = inst.dim();
        let (top, bottom) = (inst.v.top(), inst.v.bottom());
        debug_assert_eq!(top.nrows(), n);
        Self {
            label: inst.label.clone(),
            seed,
            space: SpaceSpec {
                dim: n,
                gram: matrix_to_json(inst.space.gram()),
            },
            v: MapSpec {
                domain: columns_to_json(&top),
                images: columns_to_json(&bottom),
            },
            kappa1: None,
            triplet: None,
            taus: Vec::new(),
            colligation: None,
        }
    }

    pub fn with_triplet(mut self, t: &BoundaryTriplet) -> Self {
        self.triplet = Some(TripletSpec {
            n1_gram: matrix_to_json(t.n1.gram()),
            n2_gram: matrix_to_json(t.n2.gram()),
            gamma1: matrix_to_json(&t.g1),
            gamma2: matrix_to_json(&t.g2),
        });
        self
    }

    pub fn with_tau(mut self, label: &str, tau: &LinearRelation) -> Self {
        self.taus.push(TauSpec {
            label: Some(label.to_string()),
            spanning: columns_to_json(tau.graph().basis()),
        });
        self
    }

    pub fn with_colligation(mut self, d: &UnitaryColligation) -> Self {
        self.colligation = Some(ColligationSpec {
            state_gram: matrix_to_json(d.state.gram()),
            u: matrix_to_json(&d.u),
        });
        self
    }

    pub fn instance(&self) -> Result<IsometryInstance> {
        let n = self.space.dim;
        let gram = matrix_from_json(&self.space.gram, "space.gram")?;
        square(&gram, n, "space.gram")?;
        let space = PontryaginSpace::new(gram)?;
        if self.v.domain.len() != self.v.images.len() {
            return Err(Error::Schema(format!(
                "v: {} domain vectors but {} images",
                self.v.domain.len(),
                self.v.images.len()
            )));
        }
        let domain = columns_from_json(&self.v.domain, n, "v.domain")?;
        let images = columns_from_json(&self.v.images, n, "v.images")?;
        IsometryInstance::from_map(space, &domain, &images, self.label.clone())
    }

    /// The stored triplet, or one built with `kappa1` (default 0).
    pub fn triplet(&self) -> Result<BoundaryTriplet> {
        let inst = self.instance()?;
        match &self.triplet {
            None => construct_triplet(&inst, self.kappa1.unwrap_or(0)),
            Some(spec) => {
                let n1 = space_from(&spec.n1_gram, "triplet.n1_gram")?;
                let n2 = space_from(&spec.n2_gram, "triplet.n2_gram")?;
                let g1 = matrix_from_json(&spec.gamma1, "triplet.gamma1")?;
                let g2 = matrix_from_json(&spec.gamma2, "triplet.gamma2")?;
                BoundaryTriplet::from_parts(inst, n1, n2, g1, g2)
            }
        }
    }

    pub fn taus(&self, t: &BoundaryTriplet) -> Result<Vec<(String, LinearRelation)>> {
        let len = t.n1.dim() + t.n2.dim();
        self.taus
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let basis = columns_from_json(&spec.spanning, len, "taus.spanning")?;
                let rel = LinearRelation::new(t.n2.clone(), t.n1.clone(), &basis)?;
                let label = spec.label.clone().unwrap_or_else(|| format!("tau{k}"));
                Ok((label, rel))
            })
            .collect()
    }

    pub fn colligation(&self, t: &BoundaryTriplet) -> Option<Result<UnitaryColligation>> {
        self.colligation.as_ref().map(|spec| {
            let state = space_from(&spec.state_gram, "colligation.state_gram")
                .or_else(|e| {
                    // an empty state space has an empty Gram
                    if spec.state_gram.is_empty() {
                        Ok(PontryaginSpace::hilbert(0))
                    } else {
                        Err(e)
                    }
                })?;
            let u = matrix_from_json(&spec.u, "colligation.u")?;
            UnitaryColligation::new(state, t.n2.clone(), t.n1.clone(), u)
        })
    }

    /// Every problem found, instead of stopping at the first.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        match self.triplet() {
            Err(e) => problems.push(e.to_string()),
            Ok(t) => {
                if let Err(e) = self.taus(&t) {
                    problems.push(e.to_string());
                }
                if let Some(Err(e)) = self.colligation(&t) {
                    problems.push(e.to_string());
                }
            }
        }
        problems
    }
}

/// Reads and validates an instance file.
pub fn parse_instance(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let file = InstanceFile::from_json(&text)?;
    let problems = file.validate();
    if problems.is_empty() {
        Ok(file)
    } else if problems.len() == 1 && file.instance().is_err() {
        // keep the typed error (e.g. NonIsometric) when it is the only one
        Err(file.instance().unwrap_err())
    } else {
        Err(Error::Schema(problems.join("; ")))
    }
}
