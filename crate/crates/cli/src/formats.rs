//! File formats: JSON schemas for systems, networks, polyhedral sets,
//! sampled dynamics, and certificates, plus CSV trajectory emission.
//!
//! All matrices serialize as nested row arrays, so the files are diff-able
//! and language-neutral. serde_json renders floats in shortest round-trip
//! form, which makes parse -> serialize -> parse the identity.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

use pwacert_core::approx::{DynSample, SampledDynamics};
use pwacert_core::certify::Certificate;
use pwacert_core::geometry::HPolyhedron;
use pwacert_core::sim::Trajectory;
use pwacert_core::sysmodel::{MaxoutLayer, MaxoutNet, ModelError, PwaRegion, PwaSystem};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("ragged matrix in {0}")]
    RaggedMatrix(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let text = serde_json::to_string_pretty(value).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })?;
    std::fs::write(path, text + "\n").map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, FormatError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(FormatError::RaggedMatrix(what.to_string()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// One region of a system file: dynamics `A`, `B`, `p`, guard `H x <= h`
/// over (x, u), and disturbance polyhedron `D`.
#[derive(Debug, Serialize, Deserialize)]
pub struct RegionFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    pub p: Vec<f64>,
    #[serde(rename = "H")]
    pub h_mat: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    #[serde(rename = "D")]
    pub d: HPolyhedron,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SystemFile {
    pub regions: Vec<RegionFile>,
    #[serde(rename = "X")]
    pub x: HPolyhedron,
    #[serde(rename = "U")]
    pub u: HPolyhedron,
}

impl SystemFile {
    pub fn into_system(self) -> Result<PwaSystem, FormatError> {
        let mut regions = Vec::with_capacity(self.regions.len());
        for (i, r) in self.regions.into_iter().enumerate() {
            let guard = HPolyhedron::new(
                to_matrix(&r.h_mat, &format!("region {i} guard"))?,
                DVector::from_vec(r.h),
            )
            .map_err(|_| FormatError::RaggedMatrix(format!("region {i} guard")))?;
            regions.push(PwaRegion {
                a: to_matrix(&r.a, &format!("region {i} A"))?,
                b: to_matrix(&r.b, &format!("region {i} B"))?,
                p: DVector::from_vec(r.p),
                guard,
                dist: r.d,
            });
        }
        Ok(PwaSystem::new(regions, self.x, self.u)?)
    }

    pub fn from_system(sys: &PwaSystem) -> Self {
        Self {
            regions: sys
                .regions()
                .iter()
                .map(|r| RegionFile {
                    a: from_matrix(&r.a),
                    b: from_matrix(&r.b),
                    p: r.p.iter().copied().collect(),
                    h_mat: from_matrix(r.guard.a()),
                    h: r.guard.b().iter().copied().collect(),
                    d: r.dist.clone(),
                })
                .collect(),
            x: sys.state_set().clone(),
            u: sys.input_set().clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LayerFile {
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub p: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NetworkFile {
    pub layers: Vec<LayerFile>,
    #[serde(rename = "W_out")]
    pub w_out: Vec<Vec<f64>>,
    #[serde(rename = "b_out")]
    pub b_out: Vec<f64>,
}

impl NetworkFile {
    pub fn into_net(self) -> Result<MaxoutNet, FormatError> {
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, l) in self.layers.into_iter().enumerate() {
            layers.push(MaxoutLayer {
                weights: to_matrix(&l.w, &format!("layer {i} W"))?,
                bias: DVector::from_vec(l.b),
                channels: l.p,
            });
        }
        Ok(MaxoutNet::new(
            layers,
            to_matrix(&self.w_out, "W_out")?,
            DVector::from_vec(self.b_out),
        )?)
    }

    pub fn from_net(net: &MaxoutNet) -> Self {
        Self {
            layers: net
                .layers()
                .iter()
                .map(|l| LayerFile {
                    w: from_matrix(&l.weights),
                    b: l.bias.iter().copied().collect(),
                    p: l.channels,
                })
                .collect(),
            w_out: from_matrix(net.output_weights()),
            b_out: net.output_bias().iter().copied().collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleFile {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub fx: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DynamicsFile {
    pub domain_x: HPolyhedron,
    pub domain_u: HPolyhedron,
    pub generator: Option<String>,
    pub records: Vec<SampleFile>,
}

impl DynamicsFile {
    pub fn into_dynamics(self) -> SampledDynamics {
        SampledDynamics {
            records: self
                .records
                .into_iter()
                .map(|s| DynSample {
                    x: DVector::from_vec(s.x),
                    u: DVector::from_vec(s.u),
                    fx: DVector::from_vec(s.fx),
                })
                .collect(),
            domain_x: self.domain_x,
            domain_u: self.domain_u,
            generator: self.generator,
        }
    }
}

/// Top-level certificate file: the certificate plus a timestamp, which is
/// the only field allowed to differ between identical runs.
#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub timestamp: String,
    pub certificate: Certificate,
}

pub fn timestamp() -> String {
    // Seconds since the UNIX epoch; no external clock formatting needed.
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{now}")
}

/// Writes a trajectory as CSV with columns `k, x1..xn, u1..um, d1..dn,
/// region`. The final state row carries empty input/disturbance/region
/// fields.
pub fn write_trajectory_csv(path: &Path, t: &Trajectory) -> Result<(), FormatError> {
    let n = t.states[0].len();
    let m = t.inputs.first().map_or(0, |u| u.len());
    let mut out = String::new();
    out.push('k');
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    for i in 1..=m {
        out.push_str(&format!(",u{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",d{i}"));
    }
    out.push_str(",region\n");
    for k in 0..=t.len() {
        out.push_str(&format!("{k}"));
        for v in t.states[k].iter() {
            out.push_str(&format!(",{v:.17e}"));
        }
        if k < t.len() {
            for v in t.inputs[k].iter() {
                out.push_str(&format!(",{v:.17e}"));
            }
            for v in t.disturbances[k].iter() {
                out.push_str(&format!(",{v:.17e}"));
            }
            out.push_str(&format!(",{}", t.regions[k] + 1));
        } else {
            for _ in 0..(m + n) {
                out.push(',');
            }
            out.push(',');
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a support-value table as CSV with columns `k, c1..cl`.
pub fn write_support_csv(path: &Path, rows: &[Vec<f64>]) -> Result<(), FormatError> {
    let l = rows.first().map_or(0, |r| r.len());
    let mut out = String::new();
    out.push('k');
    for i in 1..=l {
        out.push_str(&format!(",c{i}"));
    }
    out.push('\n');
    for (k, row) in rows.iter().enumerate() {
        out.push_str(&format!("{}", k + 1));
        for v in row {
            out.push_str(&format!(",{v:.17e}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}
