//! Exact discrete optimal transport for costs `c(x, y) = L(x - y)`.
//!
//! The solver is a transportation simplex over the dense bipartite graph:
//! northwest-corner start on lexicographically sorted supports (which is
//! already optimal for one-dimensional convex costs), Dantzig pricing with
//! lexicographic tie-breaks, and a Bland fallback after a run of degenerate
//! pivots. Optimality is certified by the dual potentials: feasibility plus
//! complementary slackness on the support, with the duality gap reported.
//!
//! Orientation is fixed throughout: the first marginal is `μ`, and the cost
//! argument is `x - y` with `x` drawn from `μ`, so `T_L(μ, ν)` and
//! `T_L(ν, μ)` may differ for non-even `L`.

use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::hopflax;
use crate::measure::DiscreteMeasure;
use rayon::prelude::*;

const SIZE_LIMIT: usize = 10_000_000;

/// An optimal coupling with its duality certificate.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    /// strictly positive entries `(i, j, mass)`; at most `m + k - 1` of them
    pub entries: Vec<(usize, usize, f64)>,
    pub cost: f64,
    /// dual potential on the μ support
    pub f: Vec<f64>,
    /// dual potential on the ν support
    pub g: Vec<f64>,
    pub duality_gap: f64,
}

impl TransportPlan {
    pub fn dual_value(&self) -> f64 {
        let a: f64 = self
            .f
            .iter()
            .zip(self.mu.weights())
            .map(|(f, w)| f * w)
            .sum();
        let b: f64 = self
            .g
            .iter()
            .zip(self.nu.weights())
            .map(|(g, w)| g * w)
            .sum();
        a + b
    }
}

/// Exact optimal transport between finitely supported measures.
pub fn solve_ot(mu: &DiscreteMeasure, nu: &DiscreteMeasure, spec: &CostSpec) -> Result<TransportPlan> {
    if mu.dim() != nu.dim() || mu.dim() != spec.dim() {
        return Err(Error::DimMismatch(mu.dim(), spec.dim()));
    }
    let (m, k) = (mu.len(), nu.len());
    if m * k > SIZE_LIMIT {
        return Err(Error::SizeLimit {
            m,
            k,
            limit: SIZE_LIMIT,
        });
    }
    // identical measures: the diagonal coupling has zero cost, and costs are
    // nonnegative
    if mu == nu {
        let entries = (0..m).map(|i| (i, i, mu.weights()[i])).collect();
        return Ok(TransportPlan {
            mu: mu.clone(),
            nu: nu.clone(),
            entries,
            cost: 0.0,
            f: vec![0.0; m],
            g: vec![0.0; k],
            duality_gap: 0.0,
        });
    }
    let cost = cost_matrix(mu, nu, spec)?;
    if m == 1 && k == 1 {
        return Ok(TransportPlan {
            mu: mu.clone(),
            nu: nu.clone(),
            entries: vec![(0, 0, 1.0)],
            cost: cost[0],
            f: vec![cost[0]],
            g: vec![0.0],
            duality_gap: 0.0,
        });
    }
    simplex(mu, nu, &cost)
}

fn cost_matrix(mu: &DiscreteMeasure, nu: &DiscreteMeasure, spec: &CostSpec) -> Result<Vec<f64>> {
    let k = nu.len();
    let rows: Result<Vec<Vec<f64>>> = mu
        .points()
        .par_iter()
        .map(|x| {
            let mut row = vec![0.0; k];
            let mut d = vec![0.0; x.len()];
            for (j, y) in nu.points().iter().enumerate() {
                for t in 0..x.len() {
                    d[t] = x[t] - y[t];
                }
                row[j] = spec.eval(&d)?;
            }
            Ok(row)
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

struct Basis {
    cells: Vec<(usize, usize, f64)>, // (i, j, flow); index stable, removed marked
    alive: Vec<bool>,
    row_adj: Vec<Vec<usize>>,
    col_adj: Vec<Vec<usize>>,
}

impl Basis {
    fn insert(&mut self, i: usize, j: usize, flow: f64) -> usize {
        let id = self.cells.len();
        self.cells.push((i, j, flow));
        self.alive.push(true);
        self.row_adj[i].push(id);
        self.col_adj[j].push(id);
        id
    }

    fn remove(&mut self, id: usize) {
        let (i, j, _) = self.cells[id];
        self.alive[id] = false;
        self.row_adj[i].retain(|&c| c != id);
        self.col_adj[j].retain(|&c| c != id);
    }
}

fn simplex(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cost: &[f64]) -> Result<TransportPlan> {
    let (m, k) = (mu.len(), nu.len());
    let c = |i: usize, j: usize| cost[i * k + j];

    // lexicographic sort of both supports for the northwest-corner start
    let mut row_order: Vec<usize> = (0..m).collect();
    row_order.sort_by(|&a, &b| mu.point(a).partial_cmp(mu.point(b)).unwrap());
    let mut col_order: Vec<usize> = (0..k).collect();
    col_order.sort_by(|&a, &b| nu.point(a).partial_cmp(nu.point(b)).unwrap());

    let mut basis = Basis {
        cells: Vec::with_capacity(2 * (m + k)),
        alive: Vec::new(),
        row_adj: vec![Vec::new(); m],
        col_adj: vec![Vec::new(); k],
    };
    {
        let mut a: Vec<f64> = row_order.iter().map(|&i| mu.weights()[i]).collect();
        let mut b: Vec<f64> = col_order.iter().map(|&j| nu.weights()[j]).collect();
        let (mut si, mut sj) = (0usize, 0usize);
        loop {
            let t = a[si].min(b[sj]);
            basis.insert(row_order[si], col_order[sj], t);
            a[si] -= t;
            b[sj] -= t;
            if si == m - 1 && sj == k - 1 {
                break;
            }
            if a[si] <= b[sj] && si < m - 1 {
                si += 1;
            } else {
                sj += 1;
            }
        }
    }

    let max_c = cost.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-12 * (1.0 + max_c);
    let mut f = vec![0.0f64; m];
    let mut g = vec![0.0f64; k];
    let mut degenerate_run = 0usize;
    let mut bland = false;
    let max_pivots = 50 * (m + k) * (m + k).max(64);

    for _pivot in 0..max_pivots {
        compute_potentials(&basis, m, k, |i, j| c(i, j), &mut f, &mut g);

        // pricing
        let mut enter: Option<(usize, usize, f64)> = None;
        'scan: for i in 0..m {
            for j in 0..k {
                let red = c(i, j) - f[i] - g[j];
                if red < -tol {
                    match (&enter, bland) {
                        (_, true) => {
                            enter = Some((i, j, red));
                            break 'scan;
                        }
                        (Some((_, _, best)), false) if red >= *best => {}
                        _ => enter = Some((i, j, red)),
                    }
                }
            }
        }
        let Some((ie, je, _)) = enter else {
            return finish(mu, nu, basis, cost, f, g);
        };

        // cycle: tree path from row node ie to col node je, plus the entering
        // edge; flows alternate +,-,+,... starting with + on the entering cell
        let path = tree_path(&basis, m, ie, m + je);
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for (pos, &cell) in path.iter().enumerate() {
            if pos % 2 == 0 {
                // minus positions
                let (ci, cj, flow) = basis.cells[cell];
                let better = flow < theta - 1e-15
                    || ((flow - theta).abs() <= 1e-15
                        && leaving != usize::MAX
                        && (ci, cj) < (basis.cells[leaving].0, basis.cells[leaving].1));
                if better {
                    theta = flow;
                    leaving = cell;
                }
            }
        }
        debug_assert!(leaving != usize::MAX);
        for (pos, &cell) in path.iter().enumerate() {
            if pos % 2 == 0 {
                basis.cells[cell].2 -= theta;
            } else {
                basis.cells[cell].2 += theta;
            }
        }
        basis.remove(leaving);
        basis.insert(ie, je, theta);

        if theta <= 1e-15 {
            degenerate_run += 1;
            if degenerate_run > 2 * (m + k) {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
    }
    Err(Error::QuadratureFailure(
        "transportation simplex exceeded its pivot budget".into(),
    ))
}

/// Potentials from the basis tree: `f_i + g_j = c_ij` on basic cells,
/// rooted at `f_0 = 0`.
fn compute_potentials(
    basis: &Basis,
    m: usize,
    k: usize,
    c: impl Fn(usize, usize) -> f64,
    f: &mut [f64],
    g: &mut [f64],
) {
    let mut seen = vec![false; m + k];
    let mut stack = vec![0usize];
    f[0] = 0.0;
    seen[0] = true;
    while let Some(node) = stack.pop() {
        let cells = if node < m {
            &basis.row_adj[node]
        } else {
            &basis.col_adj[node - m]
        };
        for &cell in cells {
            let (i, j, _) = basis.cells[cell];
            let other = if node < m { m + j } else { i };
            if seen[other] {
                continue;
            }
            seen[other] = true;
            if other < m {
                f[other] = c(i, j) - g[j];
            } else {
                g[other - m] = c(i, j) - f[i];
            }
            stack.push(other);
        }
    }
}

/// Cells along the unique tree path between two nodes of the basis tree
/// (rows are nodes `0..m`, columns `m..m+k`).
fn tree_path(basis: &Basis, m: usize, from: usize, to: usize) -> Vec<usize> {
    let n = basis.row_adj.len() + basis.col_adj.len();
    let mut parent_cell = vec![usize::MAX; n];
    let mut parent_node = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(from);
    seen[from] = true;
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        let cells = if node < m {
            &basis.row_adj[node]
        } else {
            &basis.col_adj[node - m]
        };
        for &cell in cells {
            let (i, j, _) = basis.cells[cell];
            let other = if node < m { m + j } else { i };
            if !seen[other] {
                seen[other] = true;
                parent_cell[other] = cell;
                parent_node[other] = node;
                queue.push_back(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = to;
    while node != from {
        path.push(parent_cell[node]);
        node = parent_node[node];
    }
    path
}

fn finish(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    basis: Basis,
    cost: &[f64],
    f: Vec<f64>,
    g: Vec<f64>,
) -> Result<TransportPlan> {
    let k = nu.len();
    let mut entries: Vec<(usize, usize, f64)> = basis
        .cells
        .iter()
        .zip(&basis.alive)
        .filter(|(&(_, _, flow), &alive)| alive && flow > 0.0)
        .map(|(&(i, j, flow), _)| (i, j, flow))
        .collect();
    entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let total: f64 = entries.iter().map(|&(i, j, w)| w * cost[i * k + j]).sum();
    let mut plan = TransportPlan {
        mu: mu.clone(),
        nu: nu.clone(),
        entries,
        cost: total,
        f,
        g,
        duality_gap: 0.0,
    };
    plan.duality_gap = (plan.cost - plan.dual_value()).abs();
    Ok(plan)
}

/// Quantile (monotone) coupling for one-dimensional convex costs: merges the
/// two quantile partitions and charges each slice `mass * L(x - y)`. Exact
/// for convex `L` on the line; serves as the solver's independent check.
pub fn ot_1d_monotone(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    spec: &CostSpec,
) -> Result<(f64, Vec<(usize, usize, f64)>)> {
    if mu.dim() != 1 || nu.dim() != 1 || spec.dim() != 1 {
        return Err(Error::PreconditionViolation(
            "the monotone coupling needs one-dimensional measures".into(),
        ));
    }
    let mut mi: Vec<usize> = (0..mu.len()).collect();
    mi.sort_by(|&a, &b| mu.point(a)[0].partial_cmp(&nu_key(mu, b)).unwrap());
    let mut ni: Vec<usize> = (0..nu.len()).collect();
    ni.sort_by(|&a, &b| nu.point(a)[0].partial_cmp(&nu_key(nu, b)).unwrap());
    let mut cost = 0.0;
    let mut plan = Vec::new();
    let (mut a, mut b) = (0usize, 0usize);
    let mut ra = mu.weights()[mi[0]];
    let mut rb = nu.weights()[ni[0]];
    loop {
        let t = ra.min(rb);
        if t > 0.0 {
            let d = mu.point(mi[a])[0] - nu.point(ni[b])[0];
            cost += t * spec.eval(&[d])?;
            plan.push((mi[a], ni[b], t));
        }
        ra -= t;
        rb -= t;
        if ra <= 1e-15 {
            a += 1;
            if a >= mi.len() {
                break;
            }
            ra = mu.weights()[mi[a]];
        }
        if rb <= 1e-15 {
            b += 1;
            if b >= ni.len() {
                break;
            }
            rb = nu.weights()[ni[b]];
        }
    }
    Ok((cost, plan))
}

fn nu_key(m: &DiscreteMeasure, i: usize) -> f64 {
    m.point(i)[0]
}

/// Complementary slackness on the support: `f_i + g_j = L(x_i - y_j)` within
/// 1e-8 on every entry carrying more than 1e-12 mass.
pub fn support_optimality_check(plan: &TransportPlan, spec: &CostSpec) -> Result<bool> {
    let mut d = vec![0.0; plan.mu.dim()];
    for &(i, j, mass) in &plan.entries {
        if mass <= 1e-12 {
            continue;
        }
        let x = plan.mu.point(i);
        let y = plan.nu.point(j);
        for t in 0..d.len() {
            d[t] = x[t] - y[t];
        }
        let c = spec.eval(&d)?;
        if (plan.f[i] + plan.g[j] - c).abs() > 1e-8 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Kantorovich dual lower bound through the Hopf-Lax operator:
/// `∫ Q_1 f dν - ∫ f dμ <= T_L(μ, ν)` for grid-supported measures.
pub fn dual_via_hopf_lax(
    f: &GridField,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    spec: &CostSpec,
) -> Result<f64> {
    let g = f.geometry();
    let wmu = mu.grid_weights(g)?;
    let wnu = nu.grid_weights(g)?;
    let q1 = hopflax::inf_convolve(f, spec, 1.0)?;
    Ok(hopflax::integrate(&q1.field, &wnu) - hopflax::integrate(f, &wmu))
}
