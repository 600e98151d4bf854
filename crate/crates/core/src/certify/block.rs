use super::convexity::{convexity_operator, ConvexityStatus};
use super::pinnacle::largest_dyadic;
use crate::algebra::{generate_cstar, OperatorSubspace};
use crate::error::{Error, Result};
use crate::kernel::lmi_maximize;
use crate::linalg::{c, expm, eye, herm_eig, logm_pos, op_norm, CMat};
use crate::states::{evaluate, support_on, PureState};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct BlockPinnacle {
    pub a: CMat,
    pub epsilon: f64,
    pub omega_value: f64,
    pub norm: f64,
    /// `(block index, ‖a p_k‖)` for every block in `K`.
    pub block_norms: Vec<(usize, f64)>,
    pub min_singular_value: f64,
    pub omega_block: usize,
    /// Stage-1 convexity of `t ↦ ω(e^{tb*}e^{tb})` for the element used.
    pub convexity: ConvexityStatus,
}

/// `a ∈ A` invertible with `ω(a*a) = 1`, `‖a‖ ≤ 1 + α` and `‖a p_k‖ < α`
/// for the central projections `p_k` of the blocks in `k_blocks`.
pub fn block_pinnacle(
    a_sp: &OperatorSubspace,
    omega: &PureState,
    k_blocks: &[usize],
    alpha: f64,
    tol: &Tolerances,
) -> Result<BlockPinnacle> {
    super::excision::check_algebra(a_sp)?;
    super::excision::check_state(a_sp, omega)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let bb = generate_cstar(a_sp);
    let n = a_sp.ambient_dim();
    let nblocks = bb.blocks.central_projections.len();
    let omega_block = bb
        .block_of(omega.xi())
        .ok_or_else(|| Error::InvalidInput("ω is not supported in a single block".into()))?;
    if let Some(&k) = k_blocks.iter().find(|&&k| k >= nblocks) {
        return Err(Error::InvalidInput(format!("block {k} does not exist ({nblocks} blocks)")));
    }
    if k_blocks.contains(&omega_block) {
        return Err(Error::InvalidInput(format!("ω lives in block {omega_block}, which is in K")));
    }
    let w = omega.density();
    let finish = |a: CMat, epsilon: f64, convexity: ConvexityStatus| -> Result<BlockPinnacle> {
        let omega_value = evaluate(&w, &(a.adjoint() * &a)).re;
        let norm = op_norm(&a);
        let block_norms: Vec<(usize, f64)> =
            k_blocks.iter().map(|&k| (k, op_norm(&(&a * &bb.blocks.central_projections[k])))).collect();
        let min_singular_value = herm_eig(&(a.adjoint() * &a))?.min().max(0.0).sqrt();
        let out = BlockPinnacle { a, epsilon, omega_value, norm, block_norms, min_singular_value, omega_block, convexity };
        if (out.omega_value - 1.0).abs() > 1e-9
            || out.norm > 1.0 + alpha
            || out.block_norms.iter().any(|&(_, x)| x >= alpha)
        {
            return Err(Error::MarginViolation(format!(
                "ω(a*a) = {}, ‖a‖ = {}, block norms {:?}",
                out.omega_value, out.norm, out.block_norms
            )));
        }
        Ok(out)
    };
    if k_blocks.is_empty() {
        return finish(eye(n), 0.0, ConvexityStatus::Certified { min_eig: 0.0 });
    }
    let s = tol.dyadic_slack;
    let epsilon = largest_dyadic(tol.dyadic_max_exp, |e| {
        2.0 * e < 1.0
            && (e.ln_1p() - 0.5 * (1.0 - 2.0 * e).ln()) < s * alpha.ln_1p()
            && e / (1.0 - 2.0 * e).sqrt() < s * alpha
    })
    .ok_or_else(|| Error::MarginViolation("no admissible ε".into()))?;
    let f = support_on(&bb, &w);
    let g = logm_pos(&(&f + eye(n) * c(epsilon, 0.0)))?;
    let lmi = lmi_maximize(a_sp, &g, &w, epsilon)?;
    if lmi.achieved < lmi.target - epsilon {
        return Err(Error::SolverShortfall { achieved: lmi.achieved, target: lmi.target - epsilon });
    }
    let min_eig = herm_eig(&convexity_operator(&lmi.b))?.min();
    let convexity = if min_eig >= -tol.convex_certified {
        ConvexityStatus::Certified { min_eig }
    } else {
        ConvexityStatus::NotChecked { min_eig }
    };
    let a0 = expm(&lmi.b)?;
    let scale = evaluate(&w, &(a0.adjoint() * &a0)).re;
    finish(a0 / c(scale.sqrt(), 0.0), epsilon, convexity)
}
