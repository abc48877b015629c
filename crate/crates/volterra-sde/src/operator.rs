//! The generator A as a diagonal operator on a truncated orthonormal basis,
//! with the Yosida scalars of its bounded approximations.

use std::path::Path;

use crate::error::{Error, Result};

/// Diagonal surrogate for a closed densely defined generator: a finite
/// list of eigenvalues on an orthonormal basis, sorted decreasing so that
/// truncation drops the stiffest modes last.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    eigenvalues: Vec<f64>,
    description: String,
}

impl SpectralOperator {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, description: &str) -> Result<SpectralOperator> {
        if eigenvalues.is_empty() {
            return Err(Error::Domain("operator needs at least one eigenvalue".into()));
        }
        if eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(Error::Domain("eigenvalues must be finite".into()));
        }
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(SpectralOperator {
            eigenvalues,
            description: description.to_string(),
        })
    }

    /// Dirichlet Laplacian on (0,1): lambda_k = -(k pi)^2, k = 1..=dim.
    pub fn dirichlet_laplacian(dim: usize) -> SpectralOperator {
        let eigenvalues = (1..=dim)
            .map(|k| -(k as f64 * std::f64::consts::PI).powi(2))
            .collect();
        SpectralOperator::from_eigenvalues(
            eigenvalues,
            &format!("Dirichlet Laplacian on (0,1), K = {dim}"),
        )
        .expect("built-in spectrum is valid")
    }

    /// One-column CSV of eigenvalues, header row optional-free (plain numbers).
    pub fn from_csv(path: &Path) -> Result<SpectralOperator> {
        let text = std::fs::read_to_string(path)?;
        let mut eigenvalues = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            match line.parse::<f64>() {
                Ok(v) => eigenvalues.push(v),
                Err(_) if lineno == 0 => continue, // header
                Err(e) => {
                    return Err(Error::Domain(format!(
                        "bad eigenvalue `{line}` on line {}: {e}",
                        lineno + 1
                    )))
                }
            }
        }
        SpectralOperator::from_eigenvalues(eigenvalues, &format!("spectrum from {}", path.display()))
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Coordinate-wise multiplication by the eigenvalues.
    pub fn apply(&self, v: &HVector) -> Result<HVector> {
        if v.dim() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(HVector::new(
            v.coeffs()
                .iter()
                .zip(&self.eigenvalues)
                .map(|(c, l)| c * l)
                .collect(),
        ))
    }
}

/// Eigenvalue of the Yosida approximation A_n = n^2 R(n,A) - n I on a
/// lambda-eigenvector: n*lambda / (n - lambda). Requires n > lambda.
/// Computed as j_scalar * lambda so that A_n = J_n A holds exactly.
pub fn yosida_scalar(n: u64, lambda: f64) -> Result<f64> {
    Ok(j_scalar(n, lambda)? * lambda)
}

/// Eigenvalue of J_n = n R(n,A): n / (n - lambda). Satisfies
/// yosida_scalar(n, lambda) = j_scalar(n, lambda) * lambda exactly.
pub fn j_scalar(n: u64, lambda: f64) -> Result<f64> {
    let nf = n as f64;
    if n == 0 || nf <= lambda {
        return Err(Error::ResolventSet { n, lambda });
    }
    Ok(nf / (nf - lambda))
}

/// Eigenvalue of the semigroup generated by A: exp(lambda t).
pub fn semigroup_scalar(t: f64, lambda: f64) -> f64 {
    debug_assert!(t >= 0.0);
    (lambda * t).exp()
}

/// Element of the state space in the operator's eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct HVector {
    coeffs: Vec<f64>,
}

impl HVector {
    pub fn new(coeffs: Vec<f64>) -> HVector {
        HVector { coeffs }
    }

    pub fn zeros(dim: usize) -> HVector {
        HVector {
            coeffs: vec![0.0; dim],
        }
    }

    /// k-th basis vector (0-based).
    pub fn basis(dim: usize, k: usize) -> HVector {
        let mut coeffs = vec![0.0; dim];
        coeffs[k] = 1.0;
        HVector { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn norm_h(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Graph norm |v|_{D(A)} = (|v|^2 + |Av|^2)^{1/2} for the given spectrum.
    pub fn norm_graph(&self, op: &SpectralOperator) -> Result<f64> {
        if self.dim() != op.dim() {
            return Err(Error::Shape {
                expected: op.dim(),
                got: self.dim(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(op.eigenvalues())
            .map(|(c, l)| (1.0 + l * l) * c * c)
            .sum::<f64>()
            .sqrt())
    }

    pub fn dot(&self, other: &HVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scaled(&self, c: f64) -> HVector {
        HVector {
            coeffs: self.coeffs.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &HVector) -> HVector {
        HVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &HVector) -> HVector {
        HVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn axpy(&mut self, c: f64, other: &HVector) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }
}
