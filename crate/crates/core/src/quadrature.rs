//! Generalized Gauss-Laguerre rules for expectations over Gamma variables.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_NODES: usize = 128;

/// Nodes and weights for `∫ f(x) x^alpha e^{-x} / Γ(alpha + 1) dx` on `[0, ∞)`.
///
/// The weights are normalized to sum to one, so [`GaussLaguerre::expectation`]
/// is `E[f(X)]` for `X ~ Gamma(alpha + 1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre<T> {
    alpha: T,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLaguerre<T> {
    /// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
    /// generalized Laguerre recurrence, weights the squared first components
    /// of its normalized eigenvectors.
    pub fn new(n: usize, alpha: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewNodes(n));
        }
        if !(alpha > -T::one()) {
            return Err(Error::InvalidArgument(format!(
                "Laguerre parameter must exceed -1, got {alpha}"
            )));
        }
        let mut jacobi = DMatrix::<T>::zeros(n, n);
        for i in 0..n {
            let fi = T::of(i as f64);
            jacobi[(i, i)] = fi + fi + alpha + T::one();
            if i > 0 {
                let off = (fi * (fi + alpha)).sqrt();
                jacobi[(i, i - 1)] = off;
                jacobi[(i - 1, i)] = off;
            }
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(T, T)> = (0..n)
            .map(|k| {
                let v0 = eig.eigenvectors[(0, k)];
                (eig.eigenvalues[k], v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
        let total = pairs.iter().fold(T::zero(), |acc, p| acc + p.1);
        Ok(Self {
            alpha,
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        })
    }

    /// Rule for `X ~ Gamma(shape, 1)`, i.e. `alpha = shape - 1`.
    pub fn for_gamma_shape(n: usize, shape: usize) -> Result<Self> {
        if shape == 0 {
            return Err(Error::InvalidArgument(
                "Gamma shape must be positive".into(),
            ));
        }
        Self::new(n, T::of(shape as f64 - 1.0))
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn expectation<F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

/// Largest Gamma shape integrated with the split rule; larger shapes use the
/// generalized rule directly.
pub const SPLIT_MAX_SHAPE: usize = 8;

/// `E[f(X)]` for `X ~ Gamma(shape, 1)` with integer shape.
///
/// For large shapes the generalized rule with `alpha = shape - 1` is used as is.
/// For small shapes the density carries mass down to the origin, and an
/// integrand like `log(1 + c x)` with large `c` varies on the scale `1 / c`
/// there, which the generalized rule resolves only algebraically. Those shapes
/// are split at `a = shape`:
///
/// * head `∫_0^a`: with `x = a e^{-u / k}` it becomes
///   `a^k / (k Γ(k)) ∫ e^{-u} f(x) e^{-x} du`, a plain Laguerre integral whose
///   integrand is smooth in `u` at every scale of `c`;
/// * tail `∫_a^∞`: with `x = a + y` it becomes
///   `∫ e^{-y} f(x) x^{k-1} e^{-a} / Γ(k) dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaQuadrature<T> {
    shape: usize,
    rule: GaussLaguerre<T>,
}

impl<T: Real> GammaQuadrature<T> {
    pub fn new(nodes: usize, shape: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::TooFewNodes(nodes));
        }
        let rule = if shape <= SPLIT_MAX_SHAPE {
            if shape == 0 {
                return Err(Error::InvalidArgument(
                    "Gamma shape must be positive".into(),
                ));
            }
            GaussLaguerre::new(nodes, T::zero())?
        } else {
            GaussLaguerre::for_gamma_shape(nodes, shape)?
        };
        Ok(Self { shape, rule })
    }

    pub fn shape(&self) -> usize {
        self.shape
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    pub fn expectation<F: Fn(T) -> T>(&self, f: F) -> T {
        if self.shape > SPLIT_MAX_SHAPE {
            return self.rule.expectation(f);
        }
        let k = T::of(self.shape as f64);
        let a = k;
        // ln Γ(k) = ln (k - 1)!
        let ln_gamma = (1..self.shape).fold(T::zero(), |acc, j| acc + T::of(j as f64).ln());
        let head_scale = (k * a.ln() - ln_gamma - k.ln()).exp();
        let head = self.rule.expectation(|u| {
            let x = a * (-u / k).exp();
            f(x) * (-x).exp()
        });
        let tail = self.rule.expectation(|y| {
            let x = a + y;
            f(x) * ((k - T::one()) * x.ln() - ln_gamma - a).exp()
        });
        head_scale * head + tail
    }
}
