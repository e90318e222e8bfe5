//! Maximum-likelihood estimation for exponential-family distributions built
//! around a penalized Newton iteration with adaptive damping, together with
//! Dirichlet and Aitchison models for compositional data, a natural-link
//! GLM layer, and the classical Newton–Raphson and fixed-point baselines.
//!
//! ```
//! use expfam::dirichlet::{init_ronning, sample_dirichlet, DirichletObjective, DirichletSuffStats};
//! use expfam::{maximize, FitOptions};
//! use nalgebra::DVector;
//!
//! let alpha = DVector::from_vec(vec![2.0, 3.0, 5.0]);
//! let data = sample_dirichlet(&alpha, 200, 42).unwrap();
//! let objective = DirichletObjective::new(DirichletSuffStats::from_data(&data));
//! let start = init_ronning(&data).unwrap();
//!
//! let fit = maximize(&objective, &start, &FitOptions::default());
//! assert!(fit.converged);
//! assert!((fit.theta_hat[2] - 5.0).abs() < 1.0);
//! ```

pub mod aitchison;
pub mod composition;
pub mod dirichlet;
pub mod error;
pub mod glm;
pub mod numdiff;
pub mod optim;
pub mod quadrature;
pub mod special;

pub use composition::CompositionMatrix;
pub use error::{Error, Result};
pub use optim::{
    maximize, Algorithm, FitOptions, FitResult, Objective, PenaltyKind, StopReason,
};
