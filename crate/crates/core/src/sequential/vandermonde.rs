//! Recovering the atoms of a spectral decomposition as polynomials in the
//! effect itself.
//!
//! If `a = Σ λ_i a_i` over a context with distinct `λ_i`, then `a^k = Σ λ_i^k a_i`
//! and the polynomial `p_j` with `p_j(λ_i) = δ_ij` gives `p_j(a) = a_j`. Its
//! coefficients solve the Vandermonde system `Σ_k c_k λ_i^k = δ_ij`.

use serde::Serialize;

use super::Polynomial;
use crate::context::{recombine, Context};
use crate::effect::Effect;
use crate::error::{Error, Result};
use crate::linalg::{solve_real, CLUSTER_TOL, EQ_TOL};

fn check_decomposition(a: &Effect, lambdas: &[f64], ctx: &Context) -> Result<()> {
    if lambdas.len() != ctx.len() {
        return Err(Error::LengthMismatch {
            expected: ctx.len(),
            got: lambdas.len(),
        });
    }
    a.model().ensure_same(ctx.model())?;
    let residual = recombine(ctx, lambdas)?
        .add_scaled(-1.0, &a.to_ambient())?
        .norm();
    if residual > EQ_TOL * a.norm().max(1.0) {
        return Err(Error::InconsistentDecomposition(residual));
    }
    Ok(())
}

/// Interpolating polynomials `p_j` with `p_j(λ_i) = δ_ij`, one per node.
fn interpolating_polynomials(nodes: &[f64]) -> Result<Vec<Polynomial>> {
    let n = nodes.len();
    let system: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&x| {
            let mut row = Vec::with_capacity(n);
            let mut p = 1.0;
            for _ in 0..n {
                row.push(p);
                p *= x;
            }
            row
        })
        .collect();
    (0..n)
        .map(|j| {
            let mut rhs = vec![0.0; n];
            rhs[j] = 1.0;
            solve_real(&system, &rhs)
                .map(Polynomial::new)
                .ok_or(Error::DuplicateCoefficients(j, j))
        })
        .collect()
}

/// Polynomials `p_i` of degree below `n` with `p_i(a) = ctx_i`.
///
/// Requires `a = Σ λ_i ctx_i` within `eq_tol` and pairwise distinct
/// coefficients (farther apart than `cluster_tol`).
pub fn recover_atoms_vandermonde(a: &Effect, lambdas: &[f64], ctx: &Context) -> Result<Vec<Polynomial>> {
    check_decomposition(a, lambdas, ctx)?;
    for i in 0..lambdas.len() {
        for j in (i + 1)..lambdas.len() {
            if (lambdas[i] - lambdas[j]).abs() <= CLUSTER_TOL {
                return Err(Error::DuplicateCoefficients(i, j));
            }
        }
    }
    interpolating_polynomials(lambdas)
}

/// Polynomial for one eigenvalue cluster and the atoms it sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenProjection {
    /// Mean of the clustered coefficients.
    pub coefficient: f64,
    /// Indices into the context.
    pub members: Vec<usize>,
    pub polynomial: Polynomial,
}

/// Like [`recover_atoms_vandermonde`], but coefficients within `cluster_tol`
/// are merged first. Each polynomial then yields the sum of the atoms in its
/// cluster, a sharp element that need not be an atom.
pub fn recover_eigenprojections(a: &Effect, lambdas: &[f64], ctx: &Context) -> Result<Vec<EigenProjection>> {
    check_decomposition(a, lambdas, ctx)?;
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&i, &j| lambdas[i].total_cmp(&lambdas[j]).then(i.cmp(&j)));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c) if lambdas[i] - lambdas[*c.last().expect("clusters are nonempty")] <= CLUSTER_TOL => {
                c.push(i)
            }
            _ => clusters.push(vec![i]),
        }
    }
    let nodes: Vec<f64> = clusters
        .iter()
        .map(|c| c.iter().map(|&i| lambdas[i]).sum::<f64>() / c.len() as f64)
        .collect();
    let polys = interpolating_polynomials(&nodes)?;
    Ok(clusters
        .into_iter()
        .zip(nodes)
        .zip(polys)
        .map(|((mut members, coefficient), polynomial)| {
            members.sort_unstable();
            EigenProjection {
                coefficient,
                members,
                polynomial,
            }
        })
        .collect())
}
