//! Exact two-phase simplex with Bland's rule.

use serde::{Deserialize, Serialize};

use crate::exact_math::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarBound {
    NonNeg,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpRow {
    pub coeffs: Vec<Rat>,
    pub kind: RowKind,
    pub rhs: Rat,
}

impl LpRow {
    pub fn new(coeffs: Vec<Rat>, kind: RowKind, rhs: Rat) -> LpRow {
        LpRow { coeffs, kind, rhs }
    }
}

/// maximize objective . x subject to the rows and variable bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPInstance {
    pub objective: Vec<Rat>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<VarBound>,
}

impl LPInstance {
    pub fn new(objective: Vec<Rat>, bounds: Vec<VarBound>) -> LPInstance {
        assert_eq!(objective.len(), bounds.len());
        LPInstance { objective, rows: Vec::new(), bounds }
    }

    pub fn push(&mut self, coeffs: Vec<Rat>, kind: RowKind, rhs: Rat) {
        assert_eq!(coeffs.len(), self.objective.len(), "row width");
        self.rows.push(LpRow { coeffs, kind, rhs });
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. Duals are shadow prices: nonnegative on `Le` rows and
/// nonpositive on `Ge` rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPSolution {
    pub status: LpStatus,
    pub objective: Rat,
    pub primal: Vec<Rat>,
    pub dual: Vec<Rat>,
    pub pivots: usize,
}

impl LPSolution {
    fn empty(status: LpStatus, pivots: usize) -> LPSolution {
        LPSolution { status, objective: Rat::zero(), primal: vec![], dual: vec![], pivots }
    }
}

/// Dense simplex tableau that accepts new columns after a solve.
pub struct Simplex {
    lp: LPInstance,
    signs: Vec<bool>,
    col_of: Vec<(usize, Option<usize>)>,
    id_col: Vec<usize>,
    is_art: Vec<bool>,
    cost: Vec<Rat>,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    obj: Vec<Rat>,
    z: Rat,
    pivots: usize,
    phase_two: bool,
    infeasible: bool,
}

impl Simplex {
    pub fn new(lp: &LPInstance) -> Simplex {
        let m = lp.rows.len();
        let mut sx = Simplex {
            lp: LPInstance { objective: vec![], rows: vec![], bounds: vec![] },
            signs: Vec::with_capacity(m),
            col_of: vec![],
            id_col: vec![0; m],
            is_art: vec![],
            cost: vec![],
            rows: vec![vec![]; m],
            rhs: Vec::with_capacity(m),
            basis: vec![0; m],
            obj: vec![],
            z: Rat::zero(),
            pivots: 0,
            phase_two: false,
            infeasible: false,
        };
        let mut kinds = Vec::with_capacity(m);
        for row in &lp.rows {
            let flip = row.rhs.is_negative();
            sx.signs.push(flip);
            kinds.push(match (row.kind, flip) {
                (RowKind::Le, true) => RowKind::Ge,
                (RowKind::Ge, true) => RowKind::Le,
                (k, _) => k,
            });
            sx.rhs.push(if flip { -&row.rhs } else { row.rhs.clone() });
        }
        sx.lp.rows = lp.rows.iter().map(|r| LpRow::new(vec![], r.kind, r.rhs.clone())).collect();
        for j in 0..lp.vars() {
            let col: Vec<Rat> = lp.rows.iter().map(|r| r.coeffs[j].clone()).collect();
            sx.push_var(&col, lp.objective[j].clone(), lp.bounds[j]);
        }
        for i in 0..m {
            let mut unit = vec![Rat::zero(); m];
            match kinds[i] {
                RowKind::Le => {
                    unit[i] = Rat::one();
                    let c = sx.push_column(unit, Rat::zero(), false);
                    sx.basis[i] = c;
                    sx.id_col[i] = c;
                }
                RowKind::Ge => {
                    unit[i] = -Rat::one();
                    sx.push_column(unit.clone(), Rat::zero(), false);
                    unit[i] = Rat::one();
                    let c = sx.push_column(unit, Rat::zero(), true);
                    sx.basis[i] = c;
                    sx.id_col[i] = c;
                }
                RowKind::Eq => {
                    unit[i] = Rat::one();
                    let c = sx.push_column(unit, Rat::zero(), true);
                    sx.basis[i] = c;
                    sx.id_col[i] = c;
                }
            }
        }
        sx
    }

    /// Appends a raw tableau column, already expressed in the current basis.
    fn push_column(&mut self, entries: Vec<Rat>, cost: Rat, art: bool) -> usize {
        for (row, e) in self.rows.iter_mut().zip(entries) {
            row.push(e);
        }
        self.cost.push(cost);
        self.is_art.push(art);
        self.obj.push(Rat::zero());
        self.cost.len() - 1
    }

    fn push_var(&mut self, col: &[Rat], c: Rat, bound: VarBound) -> usize {
        let signed: Vec<Rat> = col.iter().zip(&self.signs).map(|(a, &f)| if f { -a } else { a.clone() }).collect();
        for (row, a) in self.lp.rows.iter_mut().zip(col) {
            row.coeffs.push(a.clone());
        }
        self.lp.objective.push(c.clone());
        self.lp.bounds.push(bound);
        let p = self.push_column(signed.clone(), c.clone(), false);
        let q = match bound {
            VarBound::NonNeg => None,
            VarBound::Free => Some(self.push_column(signed.iter().map(|a| -a).collect(), -c, false)),
        };
        self.col_of.push((p, q));
        self.lp.vars() - 1
    }

    /// Adds a variable with the given row coefficients; returns its index.
    pub fn add_column(&mut self, col: Vec<Rat>, c: Rat, bound: VarBound) -> usize {
        assert_eq!(col.len(), self.lp.rows.len(), "column height");
        if !self.phase_two {
            return self.push_var(&col, c, bound);
        }
        // Express the new column in the current basis through the identity columns.
        let m = self.rows.len();
        let signed: Vec<Rat> = col.iter().zip(&self.signs).map(|(a, &f)| if f { -a } else { a.clone() }).collect();
        let mut entries = vec![Rat::zero(); m];
        let mut red = -&c;
        for (k, a) in signed.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let id = self.id_col[k];
            for i in 0..m {
                if !self.rows[i][id].is_zero() {
                    entries[i] += a * &self.rows[i][id];
                }
            }
            red += a * &self.obj[id];
        }
        for (row, a) in self.lp.rows.iter_mut().zip(&col) {
            row.coeffs.push(a.clone());
        }
        self.lp.objective.push(c.clone());
        self.lp.bounds.push(bound);
        let neg: Vec<Rat> = entries.iter().map(|a| -a).collect();
        let p = self.push_column(entries, c.clone(), false);
        self.obj[p] = red.clone();
        let q = match bound {
            VarBound::NonNeg => None,
            VarBound::Free => {
                let q = self.push_column(neg, -c, false);
                self.obj[q] = -red;
                Some(q)
            }
        };
        self.col_of.push((p, q));
        self.lp.vars() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                self.rows[i][j] -= &f * &prow[j];
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                self.obj[j] -= &f * &prow[j];
            }
            self.z -= &f * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    fn price(&mut self, cost: &[Rat]) {
        let n = cost.len();
        self.obj = cost.iter().map(|c| -c).collect();
        self.z = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..n {
                if !self.rows[i][j].is_zero() {
                    self.obj[j] += cb * &self.rows[i][j];
                }
            }
            self.z += cb * &self.rhs[i];
        }
    }

    /// Bland's rule; returns false on unboundedness.
    fn optimize(&mut self, phase_two: bool) -> bool {
        loop {
            let entering = (0..self.obj.len())
                .find(|&j| !(phase_two && self.is_art[j]) && self.obj[j].is_negative());
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(Rat, usize)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((r, bi)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((ratio, i));
                }
            }
            match best {
                None => return false,
                Some((_, r)) => self.pivot(r, c),
            }
        }
    }

    /// Pivots basic artificials (all at level zero) out wherever a structural entry allows.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.is_art[self.basis[i]] {
                if let Some(j) = (0..self.cost.len()).find(|&j| !self.is_art[j] && !self.rows[i][j].is_zero()) {
                    self.pivot(i, j);
                }
            }
        }
    }

    pub fn solve(&mut self) -> LPSolution {
        if self.infeasible {
            return LPSolution::empty(LpStatus::Infeasible, self.pivots);
        }
        if !self.phase_two {
            if self.is_art.iter().any(|&a| a) {
                let cost1: Vec<Rat> =
                    self.is_art.iter().map(|&a| if a { -Rat::one() } else { Rat::zero() }).collect();
                self.price(&cost1);
                self.optimize(false);
                if self.z.is_negative() {
                    self.infeasible = true;
                    return LPSolution::empty(LpStatus::Infeasible, self.pivots);
                }
            }
            self.drive_out_artificials();
            let cost = self.cost.clone();
            self.price(&cost);
            self.phase_two = true;
        } else {
            self.drive_out_artificials();
        }
        if !self.optimize(true) {
            return LPSolution::empty(LpStatus::Unbounded, self.pivots);
        }
        let mut x = vec![Rat::zero(); self.cost.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        let primal: Vec<Rat> = self
            .col_of
            .iter()
            .map(|&(p, q)| match q {
                Some(q) => &x[p] - &x[q],
                None => x[p].clone(),
            })
            .collect();
        let dual: Vec<Rat> = (0..self.lp.rows.len())
            .map(|i| {
                let d = &self.obj[self.id_col[i]];
                if self.signs[i] {
                    -d
                } else {
                    d.clone()
                }
            })
            .collect();
        let sol = LPSolution {
            status: LpStatus::Optimal,
            objective: self.z.clone(),
            primal,
            dual,
            pivots: self.pivots,
        };
        if let Err(msg) = check_certificate(&self.lp, &sol) {
            panic!("simplex certificate failed: {msg}");
        }
        sol
    }
}

/// Solves the LP exactly and checks the strong-duality certificate.
pub fn solve_lp_exact(lp: &LPInstance) -> LPSolution {
    Simplex::new(lp).solve()
}

/// Verifies primal feasibility, dual feasibility and equal objectives.
pub fn check_certificate(lp: &LPInstance, sol: &LPSolution) -> Result<(), String> {
    let obj: Rat = lp.objective.iter().zip(&sol.primal).map(|(c, x)| c * x).sum();
    if obj != sol.objective {
        return Err("primal objective mismatch".into());
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if *b == VarBound::NonNeg && sol.primal[j].is_negative() {
            return Err(format!("variable {j} negative"));
        }
    }
    let mut dual_obj = Rat::zero();
    let mut reduced: Vec<Rat> = lp.objective.iter().map(|c| -c).collect();
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs: Rat = row.coeffs.iter().zip(&sol.primal).map(|(a, x)| a * x).sum();
        let ok = match row.kind {
            RowKind::Le => lhs <= row.rhs && !sol.dual[i].is_negative(),
            RowKind::Ge => lhs >= row.rhs && !sol.dual[i].is_positive(),
            RowKind::Eq => lhs == row.rhs,
        };
        if !ok {
            return Err(format!("row {i} violated or dual sign wrong"));
        }
        dual_obj += &sol.dual[i] * &row.rhs;
        for (j, a) in row.coeffs.iter().enumerate() {
            if !a.is_zero() {
                reduced[j] += &sol.dual[i] * a;
            }
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        let ok = match b {
            VarBound::NonNeg => !reduced[j].is_negative(),
            VarBound::Free => reduced[j].is_zero(),
        };
        if !ok {
            return Err(format!("dual constraint {j} violated"));
        }
    }
    if dual_obj != sol.objective {
        return Err("dual objective differs".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64) -> Rat {
        Rat::from_int(x)
    }

    #[test]
    fn single_row() {
        let mut lp = LPInstance::new(vec![r(1)], vec![VarBound::Free]);
        lp.push(vec![r(1)], RowKind::Le, r(0));
        let s = solve_lp_exact(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.primal, vec![r(0)]);
        assert_eq!(s.dual, vec![r(1)]);
    }

    #[test]
    fn least_core_two_players() {
        // variables xi, y1, y2
        let mut lp = LPInstance::new(vec![r(1), r(0), r(0)], vec![VarBound::Free; 3]);
        lp.push(vec![r(0), r(1), r(1)], RowKind::Eq, r(1));
        lp.push(vec![r(-1), r(1), r(0)], RowKind::Ge, r(0));
        lp.push(vec![r(-1), r(0), r(1)], RowKind::Ge, r(0));
        let s = solve_lp_exact(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.primal, vec![Rat::new(1, 2), Rat::new(1, 2), Rat::new(1, 2)]);
    }

    #[test]
    fn infeasible() {
        let mut lp = LPInstance::new(vec![r(0)], vec![VarBound::Free]);
        lp.push(vec![r(1)], RowKind::Le, r(0));
        lp.push(vec![r(1)], RowKind::Ge, r(1));
        assert_eq!(solve_lp_exact(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LPInstance::new(vec![r(1), r(0)], vec![VarBound::NonNeg; 2]);
        lp.push(vec![r(1), r(-1)], RowKind::Le, r(3));
        assert_eq!(solve_lp_exact(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LPInstance::new(vec![r(1), r(1)], vec![VarBound::NonNeg; 2]);
        lp.push(vec![r(1), r(1)], RowKind::Eq, r(2));
        lp.push(vec![r(2), r(2)], RowKind::Eq, r(4));
        lp.push(vec![r(1), r(0)], RowKind::Le, r(1));
        let s = solve_lp_exact(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, r(2));
    }

    #[test]
    fn incremental_columns() {
        // max x1 + 2 x2 s.t. x1 + x2 = 1, later add x3 with cost 3.
        let mut lp = LPInstance::new(vec![r(1), r(2)], vec![VarBound::NonNeg; 2]);
        lp.push(vec![r(1), r(1)], RowKind::Eq, r(1));
        lp.push(vec![r(1), r(0)], RowKind::Ge, r(-5));
        let mut sx = Simplex::new(&lp);
        assert_eq!(sx.solve().objective, r(2));
        let k = sx.add_column(vec![r(1), r(0)], r(3), VarBound::NonNeg);
        let s = sx.solve();
        assert_eq!(s.objective, r(3));
        assert_eq!(s.primal[k], r(1));
        sx.add_column(vec![r(2), r(-1)], r(-1), VarBound::Free);
        let s = sx.solve();
        let mut full = lp.clone();
        for (row, extra) in full.rows.iter_mut().zip([[r(1), r(2)], [r(0), r(-1)]]) {
            row.coeffs.extend(extra);
        }
        full.objective.extend([r(3), r(-1)]);
        full.bounds.extend([VarBound::NonNeg, VarBound::Free]);
        assert_eq!(s.objective, solve_lp_exact(&full).objective);
    }

    #[test]
    fn negative_rhs_flip() {
        // max -x s.t. x >= 3 written as -x <= -3
        let mut lp = LPInstance::new(vec![r(-1)], vec![VarBound::NonNeg]);
        lp.push(vec![r(-1)], RowKind::Le, r(-3));
        let s = solve_lp_exact(&lp);
        assert_eq!(s.primal, vec![r(3)]);
        assert_eq!(s.dual, vec![r(1)]);
    }
}
