//! Maximum-weight non-zero matching through exact-weight perfect matchings.

use super::NZMatchingInstance;
use crate::error::{Error, Result};
use crate::matching::{pad_to_perfect, ExactMatchConfig, Matching, MatchingPolynomial};

fn int_weight(w: &crate::exact_math::Rat, e: usize) -> Result<i128> {
    if !w.is_integer() {
        return Err(Error::Invalid(format!("edge {e} has non-integer weight {w}")));
    }
    w.to_i64().map(i128::from).ok_or_else(|| Error::BoundExceeded(format!("edge {e} weight {w}")))
}

/// Encodes label and weight as w' = w + L a' with a' = a + A0 >= 0 and
/// L = 2 sum|w| + 1, reads every achievable total from one matching
/// polynomial, and extracts the best total whose label part is non-zero.
pub fn nz_matching_randomized(inst: &NZMatchingInstance, seed: u64, cfg: ExactMatchConfig) -> Result<Option<Matching>> {
    let g = &inst.graph;
    let mut sum_w: i128 = 0;
    for (e, ed) in g.edges.iter().enumerate() {
        sum_w += int_weight(&ed.w, e)?.abs();
    }
    let l = 2 * sum_w + 1;
    let a0 = -(g.edges.iter().map(|e| e.a).min().unwrap_or(0).min(0) as i128);
    let padded = pad_to_perfect(g);
    let mut exps = Vec::with_capacity(padded.edge_count());
    for (e, ed) in padded.edges.iter().enumerate() {
        let x = int_weight(&ed.w, e)? + l * (ed.a as i128 + a0);
        exps.push(i64::try_from(x).map_err(|_| Error::BoundExceeded(format!("encoded weight of edge {e}")))?);
    }
    let zero_target = (padded.n / 2) as i128 * a0;
    let Some(mut poly) = MatchingPolynomial::new(&padded, &exps, seed, cfg)? else { return Ok(None) };
    let base = poly.base();
    let mut cands: Vec<(i128, i128)> = poly
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .filter_map(|(t, _)| {
            let r = t as i128 + base;
            let lab = (r + sum_w).div_euclid(l);
            (lab != zero_target).then_some((r - l * lab, r))
        })
        .collect();
    cands.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    for (w, r) in cands {
        let Some(edges) = poly.extract(r, cfg.attempts) else { continue };
        let m = Matching { edges: edges.into_iter().filter(|&e| e < g.edge_count()).collect() };
        if m.is_valid(g) && m.label(g) != 0 && m.weight(g) == crate::exact_math::Rat::from_int(w as i64) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
