//! Gauss–Hermite quadrature: one-dimensional rules via Golub–Welsch and a
//! centered, scaled tensor grid over ℝ^d for the simplex integrals of the
//! Aitchison log-partition function.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// One-dimensional Gauss–Hermite rule for ∫ e^{−x²} f(x) dx.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Computes nodes and weights of the given order by the Golub–Welsch
    /// eigenvalue method on the symmetrized Hermite companion matrix.
    pub fn new(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidArgument("quadrature order must be ≥ 1".into()));
        }
        let mut companion = DMatrix::zeros(order, order);
        for i in 0..order - 1 {
            let v = (0.5 * (i as f64 + 1.0)).sqrt();
            companion[(i, i + 1)] = v;
            companion[(i + 1, i)] = v;
        }
        let eigen = companion.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = eigen
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &node)| {
                let first = eigen.eigenvectors[(0, j)];
                (node, first * first * std::f64::consts::PI.sqrt())
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Centered and scaled tensor Gauss–Hermite grid in `dim` dimensions.
///
/// Abscissae are z = center + √2·L·u with u a tensor product of the raw
/// nodes and L the lower-triangular factor of the local inverse curvature,
/// so that ∫ e^{g(z)} dz ≈ 2^{d/2}·det L·Σ w·e^{g(z)+‖u‖²}.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    rule: GaussHermite,
    dim: usize,
    center: DVector<f64>,
    scale: DMatrix<f64>,
    log_det_scale: f64,
}

impl QuadratureGrid {
    pub fn new(rule: GaussHermite, center: DVector<f64>, scale: DMatrix<f64>) -> Result<Self> {
        let dim = center.len();
        if scale.nrows() != dim || scale.ncols() != dim {
            return Err(Error::InvalidMatrix("scale factor shape mismatch"));
        }
        let mut log_det = 0.0;
        for i in 0..dim {
            let d = scale[(i, i)];
            if !(d > 0.0) {
                return Err(Error::InvalidMatrix("scale factor must have positive diagonal"));
            }
            log_det += d.ln();
        }
        Ok(Self {
            rule,
            dim,
            center,
            scale,
            log_det_scale: log_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    /// Number of tensor nodes, order^dim.
    pub fn len(&self) -> usize {
        self.rule.order().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn scale(&self) -> &DMatrix<f64> {
        &self.scale
    }

    /// log(2^{d/2} det L), the constant part of the change of variables.
    pub fn log_jacobian(&self) -> f64 {
        0.5 * self.dim as f64 * std::f64::consts::LN_2 + self.log_det_scale
    }

    /// Visits every tensor node, passing the abscissa z and the log of the
    /// weight factor ln w + ‖u‖² (the change-of-variable constant is *not*
    /// included; see [`Self::log_jacobian`]).
    pub fn for_each_node<F: FnMut(&DVector<f64>, f64)>(&self, mut visit: F) {
        let order = self.rule.order();
        let mut index = vec![0usize; self.dim];
        let mut u = DVector::zeros(self.dim);
        let sqrt2 = std::f64::consts::SQRT_2;
        loop {
            let mut log_w = 0.0;
            let mut u_sq = 0.0;
            for (d, &i) in index.iter().enumerate() {
                let node = self.rule.nodes()[i];
                u[d] = node;
                log_w += self.rule.weights()[i].ln();
                u_sq += node * node;
            }
            let z = &self.center + sqrt2 * (&self.scale * &u);
            visit(&z, log_w + u_sq);

            // Advance the mixed-radix counter.
            let mut d = 0;
            loop {
                if d == self.dim {
                    return;
                }
                index[d] += 1;
                if index[d] < order {
                    break;
                }
                index[d] = 0;
                d += 1;
            }
        }
    }
}
