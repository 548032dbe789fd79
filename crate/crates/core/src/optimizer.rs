//! Searching for auxiliary functions by linear programming.
//!
//! The conditions on `f` are linear in the coefficients once `f ≥ 0` is
//! imposed only on a finite grid of `x = cos θ` values, so each regime
//! becomes an LP. It is solved exactly over ℚ(√d) with a two-phase simplex
//! using Bland's rule. The optimum is then checked on all of Θ; a negative
//! point is added to the grid and the LP re-solved until certification
//! succeeds.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bounds::{certify as certify_bound, Bound, BoundCertificate, Condition, Regime};
use crate::cosine_poly::{chebyshev_table, CosinePoly, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::exactnum::QField;
use crate::poly::PowerPoly;
use crate::theta_sets::ThetaSet;

/// Chebyshev nodes placed in each interval of Θ.
pub const NODES_PER_INTERVAL: usize = 31;
/// Denominator used when rounding grid nodes to rationals.
pub const GRID_DENOMINATOR: i64 = 10_000;
/// Default cap on cutting-plane rounds.
pub const MAX_ROUNDS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `min c·x` subject to row constraints and `x ≥ 0`.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub objective: Vec<QField>,
    pub rows: Vec<(Vec<QField>, Relation, QField)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<QField>,
    pub value: QField,
}

struct Tableau {
    // each row holds the column entries followed by the right-hand side
    rows: Vec<Vec<QField>>,
    basis: Vec<usize>,
    // reduced costs followed by minus the current objective value
    costs: Vec<Vec<QField>>,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.rows[0].len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].inv();
        for v in self.rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row: Vec<(usize, QField)> =
            self.rows[r].iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect();
        let eliminate = |row: &mut Vec<QField>| {
            let k = row[c].clone();
            if !k.is_zero() {
                for (j, p) in &pivot_row {
                    row[*j] = &row[*j] - &(&k * p);
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        self.costs.iter_mut().for_each(eliminate);
        self.basis[r] = c;
    }

    /// Bland's rule on objective row `k`, over columns `< ncols`.
    fn run(&mut self, k: usize, ncols: usize) -> Result<()> {
        let rhs = self.rhs();
        loop {
            let Some(c) = (0..ncols).find(|&j| self.costs[k][j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, QField)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => match ratio.try_cmp(br).expect("tableau entries share one field") {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => self.basis[i] < self.basis[*bi],
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// Exact two-phase simplex.
pub fn simplex(lp: &Lp) -> Result<LpSolution> {
    let n = lp.objective.len();
    let slacks = lp.rows.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
    let structural = n + slacks;
    let mut rows = Vec::with_capacity(lp.rows.len());
    let mut basis = Vec::with_capacity(lp.rows.len());
    let mut slack = n;
    for (coeffs, rel, b) in &lp.rows {
        if coeffs.len() != n {
            return Err(Error::Internal("constraint width differs from objective".into()));
        }
        let mut row = vec![QField::zero(); structural];
        row[..n].clone_from_slice(coeffs);
        let slack_col = match rel {
            Relation::Le => Some((slack, QField::one())),
            Relation::Ge => Some((slack, QField::from_integer(-1))),
            Relation::Eq => None,
        };
        if let Some((j, v)) = &slack_col {
            row[*j] = v.clone();
            slack += 1;
        }
        row.push(b.clone());
        if b.is_negative() || (b.is_zero() && *rel == Relation::Ge) {
            row.iter_mut().for_each(|v| *v = -&*v);
        }
        // a slack with coefficient +1 can start in the basis
        let start = slack_col.map(|(j, _)| j).filter(|&j| row[j].is_positive());
        basis.push(start);
        rows.push(row);
    }
    // artificial columns for the remaining rows
    let needing: Vec<usize> = (0..rows.len()).filter(|&i| basis[i].is_none()).collect();
    let width = structural + needing.len();
    for row in rows.iter_mut() {
        let rhs = row.pop().expect("rhs");
        row.resize(width, QField::zero());
        row.push(rhs);
    }
    for (k, &i) in needing.iter().enumerate() {
        rows[i][structural + k] = QField::one();
        basis[i] = Some(structural + k);
    }
    let mut phase1 = vec![QField::zero(); width + 1];
    for &i in &needing {
        for j in (0..structural).chain([width]) {
            phase1[j] = &phase1[j] - &rows[i][j];
        }
    }
    let mut phase2 = vec![QField::zero(); width + 1];
    phase2[..n].clone_from_slice(&lp.objective);
    let basis = basis.into_iter().map(|b| b.expect("every row has a basic column")).collect();
    let mut t = Tableau { rows, basis, costs: vec![phase1, phase2] };
    let m = needing.len();

    if m > 0 {
        t.run(0, width)?;
        if !t.costs[0][width].is_zero() {
            return Err(Error::Infeasible);
        }
        // drive artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= structural {
                match (0..structural).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    if t.rows.is_empty() {
        // no constraints left: bounded only if no cost is negative
        if lp.objective.iter().any(QField::is_negative) {
            return Err(Error::Unbounded);
        }
    } else {
        t.run(1, structural)?;
    }
    let mut x = vec![QField::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[i][width].clone();
        }
    }
    let value = lp.objective.iter().zip(&x).fold(QField::zero(), |acc, (c, v)| acc + c * v);
    Ok(LpSolution { x, value })
}

/// Chebyshev nodes of `[lo, hi]` rounded to denominator `GRID_DENOMINATOR`,
/// keeping only those that stay inside the interval.
fn interval_nodes(lo: &QField, hi: &QField) -> Vec<QField> {
    let (a, b) = (lo.to_f64(), hi.to_f64());
    let mid = (a + b) / 2.0;
    let half = (b - a) / 2.0;
    let mut out = Vec::new();
    for k in 0..NODES_PER_INTERVAL {
        let t = ((2 * k + 1) as f64 * PI / (2 * NODES_PER_INTERVAL) as f64).cos();
        let num = ((mid + half * t) * GRID_DENOMINATOR as f64).round() as i64;
        let x = QField::from_rational(BigRational::new(BigInt::from(num), BigInt::from(GRID_DENOMINATOR)));
        if x.try_cmp(lo).is_some_and(|o| o.is_gt()) && x.try_cmp(hi).is_some_and(|o| o.is_lt()) {
            out.push(x);
        }
    }
    out
}

/// Finite points, interval endpoints and Chebyshev nodes of Θ.
pub fn initial_grid(theta: &ThetaSet) -> Vec<QField> {
    let mut grid: Vec<QField> = theta.points().to_vec();
    for (lo, hi) in theta.intervals() {
        grid.push(lo.clone());
        grid.push(hi.clone());
        grid.extend(interval_nodes(lo, hi));
    }
    sort_dedup(&mut grid);
    grid
}

fn sort_dedup(v: &mut Vec<QField>) {
    v.sort_by(|a, b| a.try_cmp(b).expect("grid shares one field"));
    v.dedup();
}

/// One discretized search problem.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub regime: Regime,
    pub q: u64,
    pub theta: ThetaSet,
    pub degree: usize,
    pub grid: Vec<QField>,
    /// Genus at which the `u₀ = 1` regimes evaluate the linear bound.
    pub reference_genus: u64,
}

impl LpProblem {
    pub fn new(q: u64, theta: ThetaSet, regime: Regime, degree: usize, reference_genus: u64) -> Result<Self> {
        let grid = initial_grid(&theta);
        Self::with_grid(q, theta, regime, degree, reference_genus, grid)
    }

    pub fn with_grid(
        q: u64,
        theta: ThetaSet,
        regime: Regime,
        degree: usize,
        reference_genus: u64,
        mut grid: Vec<QField>,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("field size q = {} must be at least 2", q)));
        }
        if !(2..=MAX_DEGREE).contains(&degree) {
            return Err(Error::Domain(format!("degree {} outside 2..={}", degree, MAX_DEGREE)));
        }
        if theta.is_empty() {
            return Err(Error::Domain("empty angle set".into()));
        }
        if let Some(x) = grid.iter().find(|x| !theta.contains(x)) {
            return Err(Error::Domain(format!("grid point {} lies outside the angle set", x)));
        }
        sort_dedup(&mut grid);
        Ok(LpProblem { regime, q, theta, degree, grid, reference_genus })
    }

    fn column_layout(&self) -> Columns {
        let split_u1 = self.regime != Regime::U0One;
        let scaled = matches!(self.regime, Regime::U0One | Regime::U0OneRelaxed);
        Columns { degree: self.degree, split_u1, scaled }
    }

    fn build(&self) -> (Lp, Columns) {
        let cols = self.column_layout();
        let r = QField::sqrt_of(self.q);
        let rinv = r.inv();
        let cheb: Vec<PowerPoly> = chebyshev_table(self.degree);
        let u0 = QField::from_integer(self.regime.u0());

        let mut lp = Lp { objective: vec![QField::zero(); cols.width()], rows: Vec::new() };
        for n in 1..=self.degree {
            cols.put(&mut lp.objective, n, r.pow(n as i32));
        }
        if cols.scaled {
            lp.objective[cols.s()] = QField::from_integer(2 * self.reference_genus as i64);
        }
        for x in &self.grid {
            let mut row = vec![QField::zero(); cols.width()];
            for (n, t) in cheb.iter().enumerate().take(self.degree + 1).skip(1) {
                cols.put(&mut row, n, t.eval(x));
            }
            let b = if cols.scaled {
                row[cols.s()] = u0.clone();
                QField::zero()
            } else {
                -&u0
            };
            lp.rows.push((row, Relation::Ge, b));
        }
        let mut norm = vec![QField::zero(); cols.width()];
        for n in 1..=self.degree {
            cols.put(&mut norm, n, rinv.pow(n as i32));
        }
        let target = if self.regime == Regime::U0MinusOne { QField::zero() } else { QField::one() };
        lp.rows.push((norm, Relation::Eq, target));
        (lp, cols)
    }
}

struct Columns {
    degree: usize,
    split_u1: bool,
    scaled: bool,
}

impl Columns {
    fn width(&self) -> usize {
        self.degree + self.split_u1 as usize + self.scaled as usize
    }

    fn s(&self) -> usize {
        self.degree + self.split_u1 as usize
    }

    /// Writes coefficient `v` of `u_n` into the row, mirroring it onto the
    /// negative part of a split `u₁`.
    fn put(&self, row: &mut [QField], n: usize, v: QField) {
        if n == 1 && self.split_u1 {
            row[self.degree] = -&v;
        }
        row[n - 1] = v;
    }

    fn read(&self, x: &[QField]) -> Vec<QField> {
        let mut u: Vec<QField> = x[..self.degree].to_vec();
        if self.split_u1 {
            u[0] = &u[0] - &x[self.degree];
        }
        u
    }
}

/// LP optimum as a cosine polynomial, with the LP objective: `ψ(r)` for
/// the `u₀ ∈ {0, −1}` regimes and the bound at the reference genus for
/// `u₀ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub f: CosinePoly,
    pub objective: QField,
}

pub fn solve_lp(p: &LpProblem) -> Result<Candidate> {
    let (lp, cols) = p.build();
    let sol = simplex(&lp)?;
    let mut u = vec![QField::from_integer(p.regime.u0())];
    if cols.scaled {
        let s = &sol.x[cols.s()];
        if !s.is_positive() {
            return Err(Error::Degenerate("optimum has unbounded psi(1/r)".into()));
        }
        u = vec![QField::one()];
        u.extend(cols.read(&sol.x).iter().map(|v| v / s));
        let objective = sol.value + QField::one();
        return Ok(Candidate { f: CosinePoly::new(u)?, objective });
    }
    u.extend(cols.read(&sol.x));
    Ok(Candidate { f: CosinePoly::new(u)?, objective: sol.value })
}

/// Result of checking an LP candidate on all of Θ.
#[derive(Clone, Debug)]
pub enum CertifyStep {
    Certified(Box<BoundCertificate>),
    /// A point of Θ where the candidate is negative.
    Refine(QField),
}

pub fn certify(candidate: &Candidate, p: &LpProblem) -> Result<CertifyStep> {
    match certify_bound(&candidate.f, &p.theta, p.q, p.regime) {
        Ok(cert) => Ok(CertifyStep::Certified(Box::new(cert))),
        Err(Error::ConditionFailed { condition: Condition::B, witness: Some(w) }) => Ok(CertifyStep::Refine(*w)),
        Err(e) => Err(e),
    }
}

/// A certified optimum of the refined LP.
#[derive(Clone, Debug)]
pub struct Optimum {
    pub certificate: BoundCertificate,
    pub objective: QField,
    pub rounds: usize,
    pub grid_size: usize,
}

/// The value the LP objective stands for in a certificate.
fn certified_value(cert: &BoundCertificate, g0: u64) -> Option<QField> {
    match &cert.bound {
        Bound::Linear { slope, intercept } => Some(slope * &QField::from_integer(g0 as i64) + intercept),
        Bound::Constant { .. } | Bound::GenusCap { .. } | Bound::Combined { .. } => Some(cert.psi_r.clone()),
    }
}

/// Cutting-plane loop: solve, certify, add the witness, repeat.
pub fn optimize(p: &LpProblem, max_rounds: usize) -> Result<Optimum> {
    let mut p = p.clone();
    for round in 1..=max_rounds {
        let cand = solve_lp(&p)?;
        match certify(&cand, &p)? {
            CertifyStep::Certified(cert) => {
                if certified_value(&cert, p.reference_genus).as_ref() != Some(&cand.objective) {
                    return Err(Error::Internal("certified value differs from the LP optimum".into()));
                }
                return Ok(Optimum {
                    certificate: *cert,
                    objective: cand.objective,
                    rounds: round,
                    grid_size: p.grid.len(),
                });
            }
            CertifyStep::Refine(w) => {
                p.grid.push(w);
                sort_dedup(&mut p.grid);
            }
        }
    }
    Err(Error::NonConvergence(max_rounds))
}

/// Smallest degree `2 ≤ D ≤ d_max` whose refined LP is feasible.
pub fn minimal_degree_search(
    q: u64,
    theta: &ThetaSet,
    regime: Regime,
    d_max: usize,
    reference_genus: u64,
) -> Result<(usize, Optimum)> {
    if d_max > MAX_DEGREE {
        return Err(Error::Domain(format!("degree cap {} exceeds {}", d_max, MAX_DEGREE)));
    }
    for d in 2..=d_max {
        let p = LpProblem::new(q, theta.clone(), regime, d, reference_genus)?;
        match optimize(&p, MAX_ROUNDS) {
            Ok(opt) => return Ok((d, opt)),
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QField {
        s.parse().unwrap()
    }

    fn int(n: i64) -> QField {
        QField::from_integer(n)
    }

    #[test]
    fn simplex_textbook() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  → 36 at (2, 6)
        let lp = Lp {
            objective: vec![int(-3), int(-5)],
            rows: vec![
                (vec![int(1), int(0)], Relation::Le, int(4)),
                (vec![int(0), int(2)], Relation::Le, int(12)),
                (vec![int(3), int(2)], Relation::Le, int(18)),
            ],
        };
        let s = simplex(&lp).unwrap();
        assert_eq!(s.value, int(-36));
        assert_eq!(s.x, vec![int(2), int(6)]);
    }

    #[test]
    fn simplex_surd_costs() {
        // min √2·x + y with x + y ≥ 1, x − y = 0 → x = y = 1/2
        let lp = Lp {
            objective: vec![q("sqrt(2)"), int(1)],
            rows: vec![(vec![int(1), int(1)], Relation::Ge, int(1)), (vec![int(1), int(-1)], Relation::Eq, int(0))],
        };
        let s = simplex(&lp).unwrap();
        assert_eq!(s.value, q("1/2 + 1/2*sqrt(2)"));
    }

    #[test]
    fn simplex_reports_infeasible_and_unbounded() {
        let infeasible = Lp {
            objective: vec![int(1)],
            rows: vec![(vec![int(1)], Relation::Le, int(1)), (vec![int(1)], Relation::Ge, int(2))],
        };
        assert!(matches!(simplex(&infeasible), Err(Error::Infeasible)));
        let unbounded = Lp { objective: vec![int(-1)], rows: vec![(vec![int(1)], Relation::Ge, int(1))] };
        assert!(matches!(simplex(&unbounded), Err(Error::Unbounded)));
    }

    #[test]
    fn redundant_equalities() {
        let lp = Lp {
            objective: vec![int(1), int(1)],
            rows: vec![(vec![int(1), int(1)], Relation::Eq, int(2)), (vec![int(2), int(2)], Relation::Eq, int(4))],
        };
        assert_eq!(simplex(&lp).unwrap().value, int(2));
    }

    #[test]
    fn grid_contents() {
        let theta = ThetaSet::complement_of_interval(&q("1/2"), &q("-1/2*sqrt(2)")).unwrap();
        let grid = initial_grid(&theta);
        assert!(grid.iter().all(|x| theta.contains(x)));
        assert!(grid.contains(&q("-1/2*sqrt(2)")));
        assert!(grid.len() > 2 * NODES_PER_INTERVAL);
        assert!(grid
            .iter()
            .filter(|x| x.is_rational())
            .all(|x| { x.to_rational().unwrap().denom() <= &BigInt::from(GRID_DENOMINATOR) }));
    }

    #[test]
    fn full_range_genus_free_is_infeasible() {
        let p = LpProblem::new(2, ThetaSet::full(), Regime::U0Zero, 4, 0).unwrap();
        assert!(matches!(solve_lp(&p), Err(Error::Infeasible)));
    }

    #[test]
    fn grid_feasible_candidate_is_refined() {
        let grid = vec![int(-1), int(0), int(1)];
        let p = LpProblem::with_grid(2, ThetaSet::full(), Regime::U0One, 4, 0, grid).unwrap();
        let f = CosinePoly::parse(&["1", "0", "0", "0", "2"]).unwrap();
        assert!(p.grid.iter().all(|x| !f.eval_f(x).unwrap().is_negative()));
        let cand = Candidate { f: f.clone(), objective: int(0) };
        match certify(&cand, &p).unwrap() {
            CertifyStep::Refine(w) => assert!(f.eval_f(&w).unwrap().is_negative()),
            other => panic!("expected refinement, got {:?}", other),
        }
    }

    #[test]
    fn grid_outside_theta_rejected() {
        let theta = ThetaSet::from_points(vec![int(0)]).unwrap();
        assert!(LpProblem::with_grid(2, theta, Regime::U0Zero, 3, 0, vec![int(1)]).is_err());
    }
}
