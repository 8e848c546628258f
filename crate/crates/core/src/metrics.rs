//! Concentration metrics: intensities, centers of vorticity, `W₂` to a Dirac
//! mass, exact signed `W₁`, and log–log rate fits.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler_sim::ParticleField;
use crate::kernels::Vec2;
use crate::velocity::FlowState;

/// `a_i = Σ_{p ∈ patch i} w_p`.
pub fn intensity(field: &ParticleField, i: usize) -> Result<f64> {
    Ok(field.patch(i)?.iter().map(|p| p.weight).sum())
}

fn nonzero_intensity(field: &ParticleField, i: usize) -> Result<f64> {
    let a = intensity(field, i)?;
    if a == 0.0 {
        return Err(Error::InvalidInput(format!("patch {i} has zero intensity")));
    }
    Ok(a)
}

/// `X_i = (1/a_i) Σ w_p x_p`.
pub fn center_of_vorticity(field: &ParticleField, i: usize) -> Result<Vec2> {
    let a = nonzero_intensity(field, i)?;
    Ok(field.patch(i)?.iter().map(|p| p.position * p.weight).sum::<Vec2>() / a)
}

/// `((1/|a_i|) Σ |w_p| |x_p − y|²)^{1/2}`.
pub fn w2_to_dirac(field: &ParticleField, i: usize, point: Vec2) -> Result<f64> {
    let a = nonzero_intensity(field, i)?.abs();
    let m: f64 = field.patch(i)?.iter().map(|p| p.weight.abs() * (p.position - point).norm_sq()).sum();
    Ok((m / a).sqrt())
}

/// `dX_i/dt = (1/a_i) Σ w_p F_i(x_p)`.
pub fn center_velocity(state: &FlowState, i: usize, blob: f64) -> Result<Vec2> {
    let a = nonzero_intensity(state.field(), i)?;
    let far = state.far_field_on_patch(i, blob)?;
    Ok(state.field().patch(i)?.iter().zip(far).map(|(p, f)| f * p.weight).sum::<Vec2>() / a)
}

/// Finitely many atoms with positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    atoms: Vec<(Vec2, f64)>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(Vec2, f64)>) -> Result<Self> {
        if let Some(&(x, m)) = atoms.iter().find(|(x, m)| !(*m > 0.0 && m.is_finite() && x.is_finite())) {
            return Err(Error::InvalidInput(format!("atom at {x:?} has invalid mass {m}")));
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(Vec2, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// Finitely many atoms with real masses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SignedMeasure {
    atoms: Vec<(Vec2, f64)>,
}

impl SignedMeasure {
    pub fn new(atoms: Vec<(Vec2, f64)>) -> Self {
        SignedMeasure { atoms }
    }

    /// All particles of a field.
    pub fn from_field(field: &ParticleField) -> Self {
        SignedMeasure { atoms: field.particles().iter().map(|p| (p.position, p.weight)).collect() }
    }

    /// `Σ a_i δ_{Y_i}`.
    pub fn from_vortices(positions: &[Vec2], strengths: &[f64]) -> Self {
        SignedMeasure { atoms: positions.iter().copied().zip(strengths.iter().copied()).collect() }
    }

    pub fn atoms(&self) -> &[(Vec2, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Jordan decomposition of `self − other` on the union support. Atoms at
    /// identical points are merged before splitting.
    pub fn difference_parts(&self, other: &SignedMeasure) -> (Vec<(Vec2, f64)>, Vec<(Vec2, f64)>) {
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        let mut merged: Vec<(Vec2, f64)> = Vec::new();
        let signed = self.atoms.iter().map(|&(x, m)| (x, m)).chain(other.atoms.iter().map(|&(x, m)| (x, -m)));
        for (x, m) in signed {
            let key = ((x.x + 0.0).to_bits(), (x.y + 0.0).to_bits());
            match index.get(&key) {
                Some(&k) => merged[k].1 += m,
                None => {
                    index.insert(key, merged.len());
                    merged.push((x, m));
                }
            }
        }
        let pos = merged.iter().filter(|a| a.1 > 0.0).copied().collect();
        let neg = merged.iter().filter(|a| a.1 < 0.0).map(|&(x, m)| (x, -m)).collect();
        (pos, neg)
    }
}

/// Optimal plan of a balanced transportation problem with Euclidean costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    /// `(source, sink, mass)` for every positive flow.
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

/// Exact Kantorovich transport between two positive measures of equal mass.
pub fn transport(sources: &DiscreteMeasure, sinks: &DiscreteMeasure) -> Result<TransportPlan> {
    let (s, d) = (sources.total_mass(), sinks.total_mass());
    check_balance(s, d)?;
    Ok(simplex::solve(sources.atoms(), sinks.atoms()))
}

fn check_balance(lhs: f64, rhs: f64) -> Result<()> {
    if (lhs - rhs).abs() > 1e-10 * lhs.abs().max(rhs.abs()).max(1.0) {
        return Err(Error::MassMismatch { lhs, rhs });
    }
    Ok(())
}

/// `W₁(f, g) = W₁((f − g)_+, (f − g)_−)`.
pub fn w1_signed(f: &SignedMeasure, g: &SignedMeasure) -> Result<f64> {
    check_balance(f.total_mass(), g.total_mass())?;
    let (pos, neg) = f.difference_parts(g);
    if pos.is_empty() || neg.is_empty() {
        return Ok(0.0);
    }
    Ok(simplex::solve(&pos, &neg).cost)
}

/// Least-squares slope of `log err` against `log ε`.
pub fn rate_fit(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::InvalidInput(format!("rate fit needs at least 3 pairs, got {}", pairs.len())));
    }
    if let Some(p) = pairs.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0 && p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::InvalidInput(format!("rate fit needs positive values, got {p:?}")));
    }
    let n = pairs.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().map(|p| (p.0.ln(), p.1.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("rate fit needs distinct ε values".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Transportation simplex on the dense bipartite graph. The basis is a
/// spanning tree over `m` row nodes and `n` column nodes.
mod simplex {
    use super::TransportPlan;
    use crate::kernels::Vec2;

    struct Cell {
        i: usize,
        j: usize,
        flow: f64,
    }

    pub fn solve(sources: &[(Vec2, f64)], sinks: &[(Vec2, f64)]) -> TransportPlan {
        let (m, n) = (sources.len(), sinks.len());
        let cost: Vec<f64> = sources
            .iter()
            .flat_map(|&(x, _)| sinks.iter().map(move |&(y, _)| (x - y).norm()))
            .collect();
        let supply_total: f64 = sources.iter().map(|a| a.1).sum();
        let demand_total: f64 = sinks.iter().map(|b| b.1).sum();
        let scale = supply_total / demand_total;
        let mut supply: Vec<f64> = sources.iter().map(|a| a.1).collect();
        let mut demand: Vec<f64> = sinks.iter().map(|b| b.1 * scale).collect();

        // Northwest corner staircase: exactly m + n − 1 cells, a spanning tree.
        let mut basis = Vec::with_capacity(m + n - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let f = supply[i].min(demand[j]).max(0.0);
            supply[i] -= f;
            demand[j] -= f;
            basis.push(Cell { i, j, flow: f });
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && supply[i] <= demand[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }

        let tol = 1e-13 * cost.iter().fold(1e-300f64, |a, &c| a.max(c));
        let nodes = m + n;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        let mut pot = vec![0.0; nodes];
        let mut parent = vec![usize::MAX; nodes];
        let mut visited = vec![false; nodes];
        let mut stack = Vec::with_capacity(nodes);
        let mut degenerate_run = 0usize;

        loop {
            for a in adj.iter_mut() {
                a.clear();
            }
            for (k, c) in basis.iter().enumerate() {
                adj[c.i].push(k);
                adj[m + c.j].push(k);
            }
            let other = |c: &Cell, node: usize| if node < m { m + c.j } else { c.i };

            // Potentials u_i + v_j = c_ij on the tree, rooted at row 0.
            visited.iter_mut().for_each(|v| *v = false);
            pot[0] = 0.0;
            visited[0] = true;
            stack.clear();
            stack.push(0);
            while let Some(u) = stack.pop() {
                for &k in &adj[u] {
                    let c = &basis[k];
                    let w = other(c, u);
                    if !visited[w] {
                        visited[w] = true;
                        pot[w] = cost[c.i * n + c.j] - pot[u];
                        stack.push(w);
                    }
                }
            }

            // Pricing: Dantzig, falling back to Bland after a degenerate streak.
            let bland = degenerate_run > 2 * nodes;
            let mut entering: Option<(usize, usize)> = None;
            let mut best = -tol;
            'price: for r in 0..m {
                for c in 0..n {
                    let red = cost[r * n + c] - pot[r] - pot[m + c];
                    if red < best {
                        entering = Some((r, c));
                        if bland {
                            break 'price;
                        }
                        best = red;
                    }
                }
            }
            let Some((r, c)) = entering else { break };

            // Tree path from row r to column c.
            visited.iter_mut().for_each(|v| *v = false);
            visited[r] = true;
            parent[r] = usize::MAX;
            stack.clear();
            stack.push(r);
            while let Some(u) = stack.pop() {
                if u == m + c {
                    break;
                }
                for &k in &adj[u] {
                    let w = other(&basis[k], u);
                    if !visited[w] {
                        visited[w] = true;
                        parent[w] = k;
                        stack.push(w);
                    }
                }
            }
            let mut path = Vec::new();
            let mut node = m + c;
            while node != r {
                let k = parent[node];
                path.push(k);
                node = other(&basis[k], node);
            }
            // path[0] touches column c: it loses flow, path[1] gains, ...
            let mut leave = usize::MAX;
            let mut leave_id = usize::MAX;
            let mut theta = f64::INFINITY;
            for (pos, &k) in path.iter().enumerate().step_by(2) {
                let f = basis[k].flow;
                let id = basis[k].i * n + basis[k].j;
                let better = f < theta || (bland && f == theta && id < leave_id) || (!bland && f == theta && pos == 0);
                if better {
                    theta = f;
                    leave = k;
                    leave_id = id;
                }
            }
            degenerate_run = if theta == 0.0 { degenerate_run + 1 } else { 0 };
            for (pos, &k) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    basis[k].flow = (basis[k].flow - theta).max(0.0);
                } else {
                    basis[k].flow += theta;
                }
            }
            basis[leave] = Cell { i: r, j: c, flow: theta };
        }

        let flows: Vec<(usize, usize, f64)> =
            basis.iter().filter(|c| c.flow > 0.0).map(|c| (c.i, c.j, c.flow)).collect();
        let total = flows.iter().map(|&(i, j, f)| f * cost[i * n + j]).sum();
        TransportPlan { flows, cost: total }
    }
}
