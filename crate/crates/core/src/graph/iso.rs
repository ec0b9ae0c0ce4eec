use super::Graph;

/// A vertex bijection `phi` with `phi[v]` in `h` such that `{a, b}` is an
/// edge of `g` iff `{phi[a], phi[b]}` is an edge of `h`. Plain
/// backtracking with degree pruning; meant for small graphs.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if g.n() != h.n() || g.m() != h.m() {
        return None;
    }
    let (dg, dh) = (g.degrees(), h.degrees());
    let mut sorted_g = dg.clone();
    let mut sorted_h = dh.clone();
    sorted_g.sort_unstable();
    sorted_h.sort_unstable();
    if sorted_g != sorted_h {
        return None;
    }
    let n = g.n();
    let mut adj_h = vec![vec![false; n]; n];
    for &(a, b) in h.edges() {
        adj_h[a][b] = true;
        adj_h[b][a] = true;
    }
    // BFS order over g keeps already-placed neighbours available for pruning
    let adj_g = g.adjacency();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for s in 0..n {
        if placed[s] {
            continue;
        }
        placed[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, _) in &adj_g[v] {
                if !placed[w] {
                    placed[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn extend(
        depth: usize,
        order: &[usize],
        adj_g: &[Vec<(usize, usize)>],
        adj_h: &[Vec<bool>],
        dg: &[usize],
        dh: &[usize],
        phi: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&v) = order.get(depth) else { return true };
        for cand in 0..adj_h.len() {
            if used[cand] || dg[v] != dh[cand] {
                continue;
            }
            // every placed neighbour of v must map to a neighbour of cand, and
            // the number of placed neighbours must match exactly
            let mut ok = true;
            let mut placed_nbrs = 0;
            for &(w, _) in &adj_g[v] {
                if phi[w] != usize::MAX {
                    placed_nbrs += 1;
                    if !adj_h[cand][phi[w]] {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let image_nbrs = (0..adj_h.len()).filter(|&u| adj_h[cand][u] && used[u]).count();
            if image_nbrs != placed_nbrs {
                continue;
            }
            phi[v] = cand;
            used[cand] = true;
            if extend(depth + 1, order, adj_g, adj_h, dg, dh, phi, used) {
                return true;
            }
            phi[v] = usize::MAX;
            used[cand] = false;
        }
        false
    }
    extend(0, &order, &adj_g, &adj_h, &dg, &dh, &mut phi, &mut used).then_some(phi)
}

/// Given `edge_map[k]` = the edge of `h` that corresponds to edge `k` of
/// `g`, finds a vertex bijection inducing exactly that edge correspondence.
/// Returns `None` if no such bijection exists (e.g. when the edge map is
/// only a 2-isomorphism).
pub fn vertex_map_from_edge_map(g: &Graph, h: &Graph, edge_map: &[usize]) -> Option<Vec<usize>> {
    if g.n() != h.n() || g.m() != h.m() || edge_map.len() != g.m() {
        return None;
    }
    let n = g.n();
    let adj = g.adjacency();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut set: Vec<usize> = (0..n).collect();
            for &(_, k) in &adj[v] {
                let (a, b) = h.edge(edge_map[k]);
                set.retain(|&u| u == a || u == b);
            }
            set
        })
        .collect();
    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn assign(v: usize, cands: &[Vec<usize>], phi: &mut [usize], used: &mut [bool]) -> bool {
        if v == cands.len() {
            return true;
        }
        for &u in &cands[v] {
            if used[u] {
                continue;
            }
            phi[v] = u;
            used[u] = true;
            if assign(v + 1, cands, phi, used) {
                return true;
            }
            used[u] = false;
        }
        phi[v] = usize::MAX;
        false
    }
    if !assign(0, &candidates, &mut phi, &mut used) {
        return None;
    }
    let consistent = g.edges().iter().zip(edge_map).all(|(&(a, b), &k)| {
        let (x, y) = (phi[a], phi[b]);
        h.edge(k) == (x.min(y), x.max(y))
    });
    consistent.then_some(phi)
}
