//! Three-qubit Pauli sets and linear reconstruction from them.

use std::collections::BTreeMap;

use super::PseudoPureState;
use crate::chain::{xy_unitary_closed_form, EvolutionAngle};
use crate::error::{Error, Result};
use crate::qlinalg::{expectation, pauli, tensor_all, ComplexMatrix, DensityMatrix};

pub const PAULI_COUNT: usize = 64;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

fn single(letter: usize) -> ComplexMatrix {
    match letter {
        0 => pauli::id(),
        1 => pauli::x(),
        2 => pauli::y(),
        _ => pauli::z(),
    }
}

fn digits(index: usize) -> [usize; 3] {
    [index / 16, (index / 4) % 4, index % 4]
}

/// Label of the `index`-th operator, lexicographic with `I < X < Y < Z`.
pub fn pauli_label(index: usize) -> String {
    digits(index).iter().map(|&d| LETTERS[d]).collect()
}

fn label_index(label: &str) -> Option<usize> {
    let chars: Vec<char> = label.chars().collect();
    if chars.len() != 3 {
        return None;
    }
    chars.iter().try_fold(0usize, |acc, ch| {
        LETTERS.iter().position(|l| l == ch).map(|d| acc * 4 + d)
    })
}

fn operator(index: usize) -> ComplexMatrix {
    let [l, m, r] = digits(index);
    tensor_all([&single(l), &single(m), &single(r)])
}

/// The 64 expectation values `<L M R>`, `III` first.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSet {
    values: [f64; PAULI_COUNT],
}

impl PauliSet {
    pub fn values(&self) -> &[f64; PAULI_COUNT] {
        &self.values
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        label_index(label).map(|k| self.values[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (pauli_label(k), v))
    }

    /// Every label must be present exactly once.
    pub fn from_labeled<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut seen: BTreeMap<usize, f64> = BTreeMap::new();
        for (label, value) in entries {
            let label = label.as_ref();
            let k = label_index(label)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown Pauli label {label:?}")))?;
            if seen.insert(k, value).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate Pauli label {label:?}"
                )));
            }
        }
        if seen.len() != PAULI_COUNT {
            let missing: Vec<String> = (0..PAULI_COUNT)
                .filter(|k| !seen.contains_key(k))
                .map(pauli_label)
                .collect();
            return Err(Error::InvalidArgument(format!(
                "missing Pauli labels: {}",
                missing.join(",")
            )));
        }
        let mut values = [0.0; PAULI_COUNT];
        for (k, v) in seen {
            values[k] = v;
        }
        Ok(PauliSet { values })
    }
}

pub fn pauli_set(rho: &DensityMatrix) -> Result<PauliSet> {
    if rho.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: rho.dim(),
        });
    }
    let mut values = [0.0; PAULI_COUNT];
    for (k, v) in values.iter_mut().enumerate() {
        *v = expectation(rho, &operator(k))?;
    }
    Ok(PauliSet { values })
}

/// `rho = (1/8) sum <LMR> L x M x R`.
pub fn reconstruct_from_pauli_set(set: &PauliSet) -> Result<DensityMatrix> {
    if (set.values[0] - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "<III> must be 1, got {}",
            set.values[0]
        )));
    }
    let m = set
        .values
        .iter()
        .enumerate()
        .fold(ComplexMatrix::zeros(8, 8), |acc, (k, &v)| {
            acc + operator(k).map(|z| z * (v / 8.0))
        });
    DensityMatrix::new(m)
}

/// `<X1 X3>` along the XY evolution of `initial`.
pub fn correlation_sweep(initial: &PseudoPureState, phi_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let rho = initial.matrix();
    if rho.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: rho.dim(),
        });
    }
    let x1x3 = operator(label_index("XIX").expect("valid label"));
    phi_grid
        .iter()
        .map(|&phi| {
            let evolved = rho.evolve(&xy_unitary_closed_form(EvolutionAngle(phi)))?;
            Ok((phi, expectation(&evolved, &x1x3)?))
        })
        .collect()
}
