//! File formats and command plumbing for the `sel` binary: JSON state,
//! measurement, distribution and problem files, CSV table emission, and
//! exit-code mapping.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{binary_entropy, BoundTable};
use crate::entropy::ClassicalDist;
use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, MultipartiteState, Povm, SystemLayout};
use crate::sdp::SdpProblem;

/// Matrices in JSON as separate real and imaginary row-major arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixData {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixData {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.re.len();
        if rows == 0 {
            return Err(Error::Parse("empty matrix".into()));
        }
        let cols = self.re[0].len();
        let mut m = ComplexMatrix::zeros(rows, cols);
        for (i, row) in self.re.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Parse("ragged real part".into()));
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = num_complex::Complex64::new(*v, 0.0);
            }
        }
        if !self.im.is_empty() {
            if self.im.len() != rows {
                return Err(Error::Parse("imaginary part shape differs".into()));
            }
            for (i, row) in self.im.iter().enumerate() {
                if row.len() != cols {
                    return Err(Error::Parse("ragged imaginary part".into()));
                }
                for (j, v) in row.iter().enumerate() {
                    let re = m[(i, j)].re;
                    m[(i, j)] = num_complex::Complex64::new(re, *v);
                }
            }
        }
        Ok(m)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let re = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { re, im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemSpec {
    pub label: String,
    pub dim: usize,
}

/// On-disk state: labeled factors, the density matrix, optional classical
/// flags per label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub systems: Vec<SystemSpec>,
    pub matrix: MatrixData,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classical: Vec<String>,
}

impl StateFile {
    pub fn to_state(&self) -> Result<MultipartiteState> {
        let factors: Vec<(&str, usize)> =
            self.systems.iter().map(|s| (s.label.as_str(), s.dim)).collect();
        let layout = SystemLayout::new(&factors)?;
        let state = MultipartiteState::new(self.matrix.to_matrix()?, layout)?;
        for label in &self.classical {
            crate::entropy::require_classical(&state, label)?;
        }
        Ok(state)
    }

    pub fn from_state(state: &MultipartiteState) -> Self {
        Self {
            systems: state
                .layout()
                .factors()
                .iter()
                .map(|(l, d)| SystemSpec { label: l.clone(), dim: *d })
                .collect(),
            matrix: MatrixData::from_matrix(state.matrix()),
            classical: vec![],
        }
    }
}

pub fn parse_state_file(text: &str) -> Result<StateFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_state(path: &Path) -> Result<MultipartiteState> {
    let text = std::fs::read_to_string(path)?;
    let file: StateFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path:?}: {e}")))?;
    file.to_state()
}

pub fn save_state(state: &MultipartiteState, path: &Path) -> Result<()> {
    let file = StateFile::from_state(state);
    let text =
        serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Measurement file: a list of element matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementFile {
    pub elements: Vec<MatrixData>,
}

pub fn load_povm(path: &Path) -> Result<Povm> {
    let text = std::fs::read_to_string(path)?;
    let file: MeasurementFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path:?}: {e}")))?;
    let mats = file.elements.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()?;
    Povm::new(mats)
}

/// Joint distribution file: probs[x][y].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistFile {
    pub probs: Vec<Vec<f64>>,
}

pub fn load_dist(path: &Path) -> Result<ClassicalDist> {
    let text = std::fs::read_to_string(path)?;
    let file: DistFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path:?}: {e}")))?;
    ClassicalDist::joint(file.probs)
}

/// Standard-form problem file for `sel sdp-solve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub objective: MatrixData,
    pub offset: MatrixData,
    pub choi: MatrixData,
}

pub fn load_problem(path: &Path) -> Result<SdpProblem> {
    let text = std::fs::read_to_string(path)?;
    let file: ProblemFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path:?}: {e}")))?;
    let objective = crate::operators::HermitianOp::new(file.objective.to_matrix()?)?;
    let offset = crate::operators::HermitianOp::new(file.offset.to_matrix()?)?;
    SdpProblem::new(objective, offset, file.choi.to_matrix()?)
}

/// Parsed invocation: subcommand name, inputs, smoothing parameters,
/// output path, seed and tolerance overrides. Identical configurations
/// produce byte-identical CSV.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub subcommand: String,
    pub inputs: Vec<std::path::PathBuf>,
    pub eps: Option<f64>,
    pub eps2: Option<f64>,
    pub out: Option<std::path::PathBuf>,
    pub seed: Option<u64>,
    pub gap_tol: Option<f64>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for e in [self.eps, self.eps2].into_iter().flatten() {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::Argument(format!("epsilon {e} outside [0, 1)")));
            }
        }
        if let Some(g) = self.gap_tol {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::Argument(format!("gap tolerance {g} out of range")));
            }
        }
        Ok(())
    }
}

/// Surprisal-versus-cumulative-probability curve data for n i.i.d. binary
/// trials, with the closed-form entropy anchors and the eps-cut surprisal
/// window appended to every row.
pub fn figure61(p: f64, n_list: &[u32], eps: f64) -> Result<BoundTable> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Argument(format!("p {p} outside (0, 1)")));
    }
    let h = binary_entropy(p);
    let h_min = -p.max(1.0 - p).log2();
    let h_max = 2.0 * (p.sqrt() + (1.0 - p).sqrt()).log2();
    let mut table = BoundTable::new(&[
        "n",
        "cumulative_probability",
        "surprisal_per_round",
        "h",
        "h_min",
        "h_max",
        "eps_cut_min",
        "eps_cut_max",
    ]);
    for &n in n_list {
        let groups = crate::smooth::iid_binary_groups(p, n);
        // per-string surprisal per round, grouped by type class
        let mut rows: Vec<(f64, f64)> = groups
            .iter()
            .map(|(prob, mult)| (-(prob.log2()) / n as f64, prob * mult))
            .collect();
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut cut_lo = rows.first().map(|r| r.0).unwrap_or(0.0);
        let mut cut_hi = rows.last().map(|r| r.0).unwrap_or(0.0);
        let mut cum = 0.0;
        for (surprisal, weight) in &rows {
            if cum < eps && cum + weight >= eps {
                cut_lo = *surprisal;
            }
            if cum < 1.0 - eps && cum + weight >= 1.0 - eps {
                cut_hi = *surprisal;
            }
            cum += weight;
        }
        let mut cum = 0.0;
        for (surprisal, weight) in rows {
            cum += weight;
            table.push(vec![n as f64, cum, surprisal, h, h_min, h_max, cut_lo, cut_hi])?;
        }
    }
    Ok(table)
}

/// Exit code mapping: 2 input/parse, 3 numerical failure, 4 validity
/// threshold.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Validity { .. } => 4,
        Error::Sdp(_) | Error::NonFinite => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{maximally_entangled, random_state};

    #[test]
    fn state_round_trip() {
        let dir = std::env::temp_dir().join("sel_state_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.json");
        let layout = SystemLayout::new(&[("A", 2), ("B", 3)]).unwrap();
        let rho = random_state(&layout, 3, 17).unwrap();
        save_state(&rho, &path).unwrap();
        let back = load_state(&path).unwrap();
        assert!(back.op().sub(rho.op()).max_abs() < 1e-12);
        assert_eq!(back.layout(), rho.layout());
    }

    #[test]
    fn figure61_reference_values() {
        let t = figure61(0.2, &[10], 0.0).unwrap();
        let row = &t.rows()[0];
        assert!((row[3] - 0.721928).abs() < 5e-4);
        assert!((row[4] - 0.321928).abs() < 5e-4);
        assert!((row[5] - 1.8f64.log2()).abs() < 5e-4);
        // p = 1/2: all three anchors coincide at 1
        let t = figure61(0.5, &[5], 0.0).unwrap();
        let row = &t.rows()[0];
        assert!((row[3] - 1.0).abs() < 1e-12);
        assert!((row[4] - 1.0).abs() < 1e-12);
        assert!((row[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn figure61_curve_min_dominates_h_min() {
        for n in [5u32, 12, 20] {
            let t = figure61(0.2, &[n], 0.0).unwrap();
            let min_surprisal = t
                .rows()
                .iter()
                .map(|r| r[2])
                .fold(f64::INFINITY, f64::min);
            assert!(min_surprisal >= t.rows()[0][4] - 1e-12, "n={n}");
        }
    }

    #[test]
    fn figure61_csv_deterministic() {
        let a = figure61(0.2, &[50, 100], 0.05).unwrap().to_csv();
        let b = figure61(0.2, &[50, 100], 0.05).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn classical_flag_validated() {
        let dir = std::env::temp_dir().join("sel_state_test2");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        let gamma = maximally_entangled(2);
        let mut file = StateFile::from_state(&gamma);
        file.classical = vec!["A".to_string()];
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        assert!(load_state(&path).is_err());
    }
}
