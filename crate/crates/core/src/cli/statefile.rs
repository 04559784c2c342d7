//! JSON state files: `{"n_qubits": n, "matrix": [[[re, im], ...], ...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::linalg::{c64, validate_density, ComplexMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n_qubits: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_matrix(rho: &ComplexMatrix) -> Self {
        let dim = rho.rows();
        let n_qubits = dim.trailing_zeros() as usize;
        let matrix = (0..dim)
            .map(|r| {
                (0..rho.cols())
                    .map(|c| [rho[(r, c)].re, rho[(r, c)].im])
                    .collect()
            })
            .collect();
        StateFile { n_qubits, matrix }
    }

    /// The matrix, checked for shape only.
    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.n_qubits == 0 || self.n_qubits > 16 {
            return Err(CliError::parse(format!(
                "n_qubits = {} is out of range",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        if self.matrix.len() != dim || self.matrix.iter().any(|row| row.len() != dim) {
            return Err(CliError::parse(format!(
                "matrix must be {dim}x{dim} for {} qubits",
                self.n_qubits
            )));
        }
        let data = self
            .matrix
            .iter()
            .flatten()
            .map(|&[re, im]| c64(re, im))
            .collect();
        ComplexMatrix::from_vec(dim, dim, data).map_err(CliError::from)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

pub fn parse_state(text: &str) -> Result<ComplexMatrix, CliError> {
    let file: StateFile = serde_json::from_str(text)
        .map_err(|e| CliError::parse(format!("malformed state file: {e}")))?;
    let rho = file.to_matrix()?;
    validate_density(&rho)?;
    Ok(rho)
}

/// Reads and validates a state file.
pub fn read_state(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_state(&text)
}

pub fn write_state(path: &Path, rho: &ComplexMatrix) -> Result<(), CliError> {
    fs::write(path, StateFile::from_matrix(rho).to_json())
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_density;

    #[test]
    fn round_trip_is_bitwise() {
        let rho = random_density(3, 8, 21).unwrap();
        let text = StateFile::from_matrix(&rho).to_json();
        let back = parse_state(&text).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn rejects_bad_files() {
        assert_eq!(parse_state("{").unwrap_err().code, 2);
        assert_eq!(
            parse_state(r#"{"n_qubits":1,"matrix":[[[1,0]]]}"#)
                .unwrap_err()
                .code,
            2
        );
        let non_psd = r#"{"n_qubits":1,"matrix":[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#;
        assert_eq!(parse_state(non_psd).unwrap_err().code, 3);
        let ok = r#"{"n_qubits":1,"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]}"#;
        assert!(parse_state(ok).is_ok());
    }
}
