//! Exact optimal transport between finite measures.

/// Masses below this count as exhausted.
const MASS_EPS: f64 = 1e-14;

/// Optimal plan of the transportation problem with supplies `a`, demands `b`
/// and cost `cost(i, j) ≥ 0`, by successive shortest paths with Dijkstra on
/// reduced costs. Returns `(total cost, [(i, j, mass)])`.
///
/// Supplies and demands must have equal totals. Each augmentation exhausts a
/// supply, a demand or a backward residual edge; every step is `O((n+m)²)`.
pub fn transport_plan(
    a: &[f64],
    b: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> (f64, Vec<(usize, usize, f64)>) {
    let (n, m) = (a.len(), b.len());
    let c: Vec<f64> = (0..n * m).map(|k| cost(k / m, k % m)).collect();
    let mut flow = vec![0.0f64; n * m];
    let mut supply = a.to_vec();
    let mut demand = b.to_vec();
    // node k < n is left vertex k, node n + j is right vertex j
    let total = n + m;
    let mut pot = vec![0.0f64; total];
    let mut dist = vec![f64::INFINITY; total];
    let mut prev = vec![usize::MAX; total];
    let mut done = vec![false; total];

    loop {
        if !supply.iter().any(|&s| s > MASS_EPS) || !demand.iter().any(|&d| d > MASS_EPS) {
            break;
        }
        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        for i in 0..n {
            if supply[i] > MASS_EPS {
                dist[i] = 0.0;
            }
        }
        // dense Dijkstra
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..total {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < n {
                for j in 0..m {
                    let v = n + j;
                    if done[v] {
                        continue;
                    }
                    let nd = best + c[u * m + j] + pot[u] - pot[v];
                    if nd < dist[v] {
                        dist[v] = nd;
                        prev[v] = u;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if !done[i] && flow[i * m + j] > MASS_EPS {
                        let nd = best - c[i * m + j] + pot[u] - pot[i];
                        if nd < dist[i] {
                            dist[i] = nd;
                            prev[i] = u;
                        }
                    }
                }
            }
        }
        let target = (0..m)
            .filter(|&j| demand[j] > MASS_EPS && dist[n + j].is_finite())
            .min_by(|&x, &y| dist[n + x].total_cmp(&dist[n + y]));
        let Some(tj) = target else { break };
        let t = n + tj;
        let dt = dist[t];
        for v in 0..total {
            pot[v] += dist[v].min(dt);
        }

        // bottleneck along the path
        let mut amount = demand[tj];
        let mut v = t;
        loop {
            let u = prev[v];
            if u == usize::MAX {
                amount = amount.min(supply[v]);
                break;
            }
            if v < n {
                // backward edge right(u) -> left(v)
                amount = amount.min(flow[v * m + (u - n)]);
            }
            v = u;
        }
        let mut v = t;
        loop {
            let u = prev[v];
            if u == usize::MAX {
                supply[v] -= amount;
                break;
            }
            if v >= n {
                flow[u * m + (v - n)] += amount;
            } else {
                flow[v * m + (u - n)] -= amount;
            }
            v = u;
        }
        demand[tj] -= amount;
    }

    let mut cost_total = 0.0;
    let mut plan = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let f = flow[i * m + j];
            if f > MASS_EPS {
                cost_total += f * c[i * m + j];
                plan.push((i, j, f));
            }
        }
    }
    (cost_total, plan)
}

/// `W₁` between weighted point masses on the line via `∫ |F − G|`.
pub fn w1_line(x: &[f64], a: &[f64], y: &[f64], b: &[f64]) -> f64 {
    let mut events: Vec<(f64, f64)> = x
        .iter()
        .zip(a)
        .map(|(&p, &w)| (p, w))
        .chain(y.iter().zip(b).map(|(&p, &w)| (p, -w)))
        .collect();
    events.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut cdf_gap = 0.0;
    let mut total = 0.0;
    for k in 0..events.len() {
        cdf_gap += events[k].1;
        if let Some(next) = events.get(k + 1) {
            total += cdf_gap.abs() * (next.0 - events[k].0);
        }
    }
    total
}
