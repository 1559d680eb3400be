//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use deconflict::conflict::{Conflict, ConflictSet, PointPair, SeparationParams};
use deconflict::graph::{Instance, SimpleGraph};
use deconflict::qubo::{BinaryQuadraticForm, Discretization, FlightConflictTable, GlobalModel, PenaltyWeights, VariableKey};
use deconflict::trajectory::{FlightSet, Trajectory, TrajectoryPoint};
use rand::Rng;

// ---------------------------------------------------------------- detection

/// Great-circle distance by the spherical law of cosines, nautical miles.
pub fn distance_nm(p: &TrajectoryPoint, q: &TrajectoryPoint) -> f64 {
    let r = 3440.065;
    let (a, b) = (p.latitude.to_radians(), q.latitude.to_radians());
    let dl = (q.longitude - p.longitude).to_radians();
    let c = a.sin() * b.sin() + a.cos() * b.cos() * dl.cos();
    r * c.clamp(-1.0, 1.0).acos()
}

/// All spatially conflicting sample pairs with `|s - t| < window`.
pub fn spatial_pairs(a: &Trajectory, b: &Trajectory, params: &SeparationParams, window: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for (s, p) in a.samples() {
        for (t, q) in b.samples() {
            if (s - t).abs() < window
                && (p.altitude - q.altitude).abs() < params.vertical_ft
                && distance_nm(p, q) < params.horizontal_nm
            {
                out.insert((s, t));
            }
        }
    }
    out
}

/// Connected groups of `pairs` under king moves, by breadth-first search.
pub fn king_clusters(pairs: &BTreeSet<(i64, i64)>) -> Vec<BTreeSet<(i64, i64)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in pairs {
        if !seen.insert(start) {
            continue;
        }
        let mut cluster = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((s, t)) = queue.pop_front() {
            for ds in -1..=1 {
                for dt in -1..=1 {
                    let q = (s + ds, t + dt);
                    if pairs.contains(&q) && seen.insert(q) {
                        cluster.insert(q);
                        queue.push_back(q);
                    }
                }
            }
        }
        out.push(cluster);
    }
    out
}

/// `(first, second, pairs)` of one conflict.
pub type Signature = (String, String, BTreeSet<(i64, i64)>);

/// Signatures of every conflict, found by exhaustive search.
pub fn reference_conflicts(
    flights: &FlightSet,
    params: &SeparationParams,
    d_max: i64,
) -> BTreeSet<Signature> {
    let list = flights.flights();
    let mut out = BTreeSet::new();
    for (n, a) in list.iter().enumerate() {
        for b in &list[n + 1..] {
            let pairs = spatial_pairs(a, b, params, d_max + params.temporal_min);
            for c in king_clusters(&pairs) {
                out.insert((a.flight_id().to_owned(), b.flight_id().to_owned(), c));
            }
        }
    }
    out
}

pub fn conflict_signature(cs: &ConflictSet) -> BTreeSet<Signature> {
    cs.conflicts()
        .iter()
        .map(|c| {
            let pairs = c.pairs().iter().map(|p| (p.s, p.t)).collect();
            (c.first().to_owned(), c.second().to_owned(), pairs)
        })
        .collect()
}

/// Whether the delayed flights come within the separation minima at any of
/// `pairs`: times `s + d_first` and `t + d_second` closer than the temporal minimum.
pub fn actualized(pairs: &BTreeSet<(i64, i64)>, d_first: i64, d_second: i64, temporal_min: i64) -> bool {
    pairs.iter().any(|&(s, t)| ((s + d_first) - (t + d_second)).abs() < temporal_min)
}

// ------------------------------------------------------------ random inputs

/// Small random instance with conflicts given directly by king-connected
/// point-pair walks; flight names are `F0`, `F1`, ...
pub fn random_instance(rng: &mut impl Rng, max_flights: usize, max_conflicts: usize, dt: i64, d_max: i64) -> Instance {
    let flights = rng.gen_range(2..=max_flights);
    let count = rng.gen_range(1..=max_conflicts);
    let mut conflicts = Vec::new();
    for id in 0..count {
        let i = rng.gen_range(0..flights - 1);
        let j = rng.gen_range(i + 1..flights);
        let mut s = rng.gen_range(0..120);
        let mut t = s + rng.gen_range(-(d_max + dt - 1)..=(d_max + dt - 1));
        let mut pairs = vec![PointPair::new(s, t)];
        for _ in 0..rng.gen_range(0..4) {
            s += 1;
            t += rng.gen_range(-1..=1);
            pairs.push(PointPair::new(s, t));
        }
        conflicts.push(Conflict::new(id, format!("F{i}"), format!("F{j}"), pairs, dt).unwrap());
    }
    Instance::from_conflicts(conflicts, d_max).unwrap()
}

/// Two flights, one conflict whose forbidden interval is exactly `[lo, hi]`
/// for the temporal minimum `dt`.
pub fn interval_instance(lo: i64, hi: i64, dt: i64, d_max: i64) -> Instance {
    let (a, b) = (lo + dt - 1, hi - dt + 1);
    assert!(a <= b && b - a <= 2, "interval not representable by one king walk");
    let mut pairs = vec![PointPair::new(10, 10 + a)];
    if b != a {
        pairs.push(PointPair::new(11, 11 + b));
    }
    let c = Conflict::new(0, "A", "B", pairs, dt).unwrap();
    let inst = Instance::from_conflicts(vec![c], d_max).unwrap();
    let iv = inst.conflicts()[0].forbidden_interval();
    assert_eq!((iv.min, iv.max), (lo, hi));
    inst
}

pub fn random_form(rng: &mut impl Rng, n: usize, density: f64) -> BinaryQuadraticForm<f64> {
    let mut q = BinaryQuadraticForm::with_anonymous(n);
    let coefficient = |rng: &mut dyn rand::RngCore| (rng.gen_range(-40i32..=40) as f64) / 4.0;
    for i in 0..n {
        let c = coefficient(rng);
        q.add_linear(i, c);
        for j in i + 1..n {
            if rng.gen_bool(density) {
                let c = coefficient(rng);
                q.add_quadratic(i, j, c);
            }
        }
    }
    q.add_offset(coefficient(rng));
    q
}

pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |m| (0..n).map(|b| m >> b & 1 == 1).collect())
}

// ------------------------------------------------------- cost evaluators

/// Reads a bit assignment through variable keys.
pub struct View<'a> {
    form: &'a BinaryQuadraticForm<f64>,
    bits: &'a [bool],
}

impl<'a> View<'a> {
    pub fn new(form: &'a BinaryQuadraticForm<f64>, bits: &'a [bool]) -> Self {
        Self { form, bits }
    }

    pub fn bit(&self, key: &VariableKey) -> f64 {
        match self.form.index_of(key) {
            Some(i) if self.bits[i] => 1.0,
            _ => 0.0,
        }
    }

    pub fn has(&self, key: &VariableKey) -> bool {
        self.form.index_of(key).is_some()
    }

    /// Values of all keys selected by `pick`, in index order.
    pub fn values<T>(&self, pick: impl Fn(&VariableKey) -> Option<T>) -> Vec<(T, f64)> {
        self.form
            .keys()
            .iter()
            .enumerate()
            .filter_map(|(i, k)| pick(k).map(|v| (v, if self.bits[i] { 1.0 } else { 0.0 })))
            .collect()
    }
}

fn one_hot_violation(bits: impl Iterator<Item = f64>) -> f64 {
    let s: f64 = bits.sum();
    (s - 1.0) * (s - 1.0)
}

fn departure_bits(v: &View, disc: &Discretization, flight: usize) -> Vec<(i64, f64)> {
    (0..=disc.levels() as usize)
        .map(|level| (disc.delay(level), v.bit(&VariableKey::DepartureDelay { flight, level })))
        .collect()
}

pub fn departure_cost(
    inst: &Instance,
    disc: &Discretization,
    w: &PenaltyWeights<f64>,
    form: &BinaryQuadraticForm<f64>,
    bits: &[bool],
) -> f64 {
    let v = View::new(form, bits);
    let mut encoding = 0.0;
    let mut delay = 0.0;
    for i in 0..inst.num_flights() {
        let d = departure_bits(&v, disc, i);
        encoding += one_hot_violation(d.iter().map(|x| x.1));
        delay += d.iter().map(|&(value, x)| value as f64 * x).sum::<f64>();
    }
    let mut conflict = 0.0;
    for (k, c) in inst.conflicts().iter().enumerate() {
        let (i, j) = inst.endpoints(k);
        for (a, x) in departure_bits(&v, disc, i) {
            for (b, y) in departure_bits(&v, disc, j) {
                if c.forbidden_interval().contains(a - b) {
                    conflict += x * y;
                }
            }
        }
    }
    w.encoding * encoding + delay + w.conflict * conflict
}

/// `3z + xy - 2xz - 2yz`.
pub fn product_penalty(x: f64, y: f64, z: f64) -> f64 {
    3.0 * z + x * y - 2.0 * x * z - 2.0 * y * z
}

pub fn global_cost(model: &GlobalModel, w: &PenaltyWeights<f64>, form: &BinaryQuadraticForm<f64>, bits: &[bool]) -> f64 {
    let v = View::new(form, bits);
    let d = |flight, level| v.bit(&VariableKey::DepartureDelay { flight, level });
    let th = |flight, option| v.bit(&VariableKey::Transform { flight, option });
    let mut encoding = 0.0;
    let mut delay = 0.0;
    for (i, values) in model.delay_values.iter().enumerate() {
        encoding += one_hot_violation((0..values.len()).map(|a| d(i, a)));
        encoding += one_hot_violation((0..model.transform_values[i].len()).map(|p| th(i, p)));
        delay += values.iter().enumerate().map(|(a, &val)| val as f64 * d(i, a)).sum::<f64>();
    }
    let mut consistency = 0.0;
    for key in form.keys() {
        match *key {
            VariableKey::PairDelay { first, second } => {
                consistency += product_penalty(d(first.0, first.1), d(second.0, second.1), v.bit(key));
            }
            VariableKey::PairTransform { first, second } => {
                consistency += product_penalty(th(first.0, first.1), th(second.0, second.1), v.bit(key));
            }
            _ => {}
        }
    }
    let mut conflict = 0.0;
    for f in &model.forbidden {
        let (a, b) = if f.first.flight < f.second.flight {
            (f.first, f.second)
        } else {
            (f.second, f.first)
        };
        conflict += v.bit(&VariableKey::PairDelay {
            first: (a.flight, a.delay),
            second: (b.flight, b.delay),
        }) * v.bit(&VariableKey::PairTransform {
            first: (a.flight, a.transform),
            second: (b.flight, b.transform),
        });
    }
    w.encoding * encoding + w.consistency * consistency + delay + w.conflict * conflict
}

pub fn exclusive_cost(
    inst: &Instance,
    maneuvers: &FlightConflictTable,
    disc: &Discretization,
    w: &PenaltyWeights<f64>,
    form: &BinaryQuadraticForm<f64>,
    bits: &[bool],
) -> f64 {
    let v = View::new(form, bits);
    let mut total = 0.0;
    for i in 0..inst.num_flights() {
        let d = departure_bits(&v, disc, i);
        total += w.encoding * one_hot_violation(d.iter().map(|x| x.1));
        total += d.iter().map(|&(value, x)| value as f64 * x).sum::<f64>();
    }
    for k in 0..inst.num_conflicts() {
        let (i, j) = inst.endpoints(k);
        let a_i = v.bit(&VariableKey::Maneuver { conflict: k, flight: i });
        let a_j = 1.0 - a_i;
        total += maneuvers.get(i, k).unwrap() as f64 * a_i + maneuvers.get(j, k).unwrap() as f64 * a_j;
    }
    total
}

pub fn flexible_cost(
    inst: &Instance,
    maneuvers: &FlightConflictTable,
    disc: &Discretization,
    w: &PenaltyWeights<f64>,
    allow_both: bool,
    form: &BinaryQuadraticForm<f64>,
    bits: &[bool],
) -> f64 {
    let v = View::new(form, bits);
    let a = |k: usize, f: usize| v.bit(&VariableKey::Maneuver { conflict: k, flight: f });
    let mut encoding = 0.0;
    let mut delay = 0.0;
    for i in 0..inst.num_flights() {
        let d = departure_bits(&v, disc, i);
        encoding += one_hot_violation(d.iter().map(|x| x.1));
        delay += d.iter().map(|&(value, x)| value as f64 * x).sum::<f64>();
        for &k in inst.flight_conflicts(i) {
            delay += maneuvers.get(i, k).unwrap() as f64 * a(k, i);
        }
    }
    // accumulated delay of flight f on arrival at k
    let accumulated = |f: usize, k: usize| {
        let mut d: f64 = departure_bits(&v, disc, f).iter().map(|&(value, x)| value as f64 * x).sum();
        for &k2 in inst.upstream(f, k) {
            d += maneuvers.get(f, k2).unwrap() as f64 * a(k2, f);
        }
        d
    };
    let mut consistency = 0.0;
    let mut conflict = 0.0;
    for (k, c) in inst.conflicts().iter().enumerate() {
        let (i, j) = inst.endpoints(k);
        let grid = v.values(|key| match *key {
            VariableKey::DelayDiff { conflict, value } if conflict == k => Some(value),
            _ => None,
        });
        encoding += one_hot_violation(grid.iter().map(|x| x.1));
        let encoded: f64 = grid.iter().map(|&(g, x)| g as f64 * x).sum();
        let gap = accumulated(i, k) - accumulated(j, k) - encoded;
        consistency += gap * gap;
        let (ai, aj) = (a(k, i), a(k, j));
        let blocked = grid.iter().filter(|(g, _)| c.forbidden_interval().contains(*g));
        if allow_both {
            let z = v.bit(&VariableKey::Ancilla { conflict: k });
            consistency += (ai + aj) * (1.0 - 2.0 * z) + ai * aj + z;
            conflict += blocked.map(|&(_, x)| x * (1.0 - z)).sum::<f64>();
        } else {
            conflict += blocked.map(|&(_, x)| x * (1.0 - ai - aj) + 2.0 * ai * aj).sum::<f64>();
        }
    }
    w.encoding * encoding + delay + w.consistency * consistency + w.conflict * conflict
}

pub fn interstitial_cost(
    inst: &Instance,
    bounds: &FlightConflictTable,
    disc: &Discretization,
    w: &PenaltyWeights<f64>,
    form: &BinaryQuadraticForm<f64>,
    bits: &[bool],
) -> f64 {
    let v = View::new(form, bits);
    let accum = |f: usize, k: usize| {
        v.values(|key| match *key {
            VariableKey::AccumDelay { flight, conflict, value } if flight == f && conflict == k => Some(value),
            _ => None,
        })
    };
    let mut encoding = 0.0;
    let mut consistency = 0.0;
    let mut delay = 0.0;
    for i in 0..inst.num_flights() {
        let mut previous = departure_bits(&v, disc, i);
        encoding += one_hot_violation(previous.iter().map(|x| x.1));
        for &k in inst.flight_conflicts(i) {
            let current = accum(i, k);
            encoding += one_hot_violation(current.iter().map(|x| x.1));
            let bound = bounds.get(i, k).unwrap();
            for &(g, x) in &current {
                for &(g2, y) in &previous {
                    if g < g2 || g - g2 > bound {
                        consistency += x * y;
                    }
                }
            }
            previous = current;
        }
        delay += previous.iter().map(|&(g, x)| g as f64 * x).sum::<f64>();
    }
    let mut conflict = 0.0;
    for (k, c) in inst.conflicts().iter().enumerate() {
        let (i, j) = inst.endpoints(k);
        for (g, x) in accum(i, k) {
            for (g2, y) in accum(j, k) {
                if c.forbidden_interval().contains(g - g2) {
                    conflict += x * y;
                }
            }
        }
    }
    w.encoding * encoding + w.consistency * consistency + w.conflict * conflict + delay
}

// ------------------------------------------------------------------ graphs

/// Exact treewidth by dynamic programming over vertex subsets.
pub fn exact_treewidth(n: usize, adj: &[u32]) -> usize {
    if n == 0 {
        return 0;
    }
    // vertices outside s and v reachable from v through s
    let q = |s: u32, v: usize| -> usize {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut outside = 0u32;
        while let Some(u) = stack.pop() {
            let mut nb = adj[u] & !seen;
            while nb != 0 {
                let x = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                seen |= 1 << x;
                if s >> x & 1 == 1 {
                    stack.push(x);
                } else {
                    outside |= 1 << x;
                }
            }
        }
        outside.count_ones() as usize
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![0usize; 1 << n];
    for s in 1..=full {
        let mut best = usize::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            best = best.min(tw[without as usize].max(q(without, v)));
        }
        tw[s as usize] = best;
    }
    tw[full as usize]
}

pub fn is_connected(n: usize, adj: &[u32]) -> bool {
    if n == 0 {
        return true;
    }
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == (1u32 << n) - 1
}

fn refine(adj: &[u32], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    'outer: loop {
        for w in 0..cells.len() {
            let mask: u32 = cells[w].iter().map(|&v| 1u32 << v).sum();
            for c in 0..cells.len() {
                if cells[c].len() < 2 {
                    continue;
                }
                let mut by_count: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
                for &v in &cells[c] {
                    by_count.entry((adj[v] & mask).count_ones()).or_default().push(v);
                }
                if by_count.len() > 1 {
                    let parts: Vec<Vec<usize>> = by_count.into_values().collect();
                    cells.splice(c..=c, parts);
                    continue 'outer;
                }
            }
        }
        return cells;
    }
}

fn leaf_code(n: usize, adj: &[u32], order: &[usize]) -> u64 {
    let mut code = 0u64;
    let mut bit = 0;
    for a in 0..n {
        for b in a + 1..n {
            if adj[order[a]] >> order[b] & 1 == 1 {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

fn search(n: usize, adj: &[u32], cells: Vec<Vec<usize>>) -> u64 {
    let cells = refine(adj, cells);
    match cells.iter().position(|c| c.len() > 1) {
        None => {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            leaf_code(n, adj, &order)
        }
        Some(target) => cells[target]
            .iter()
            .map(|&v| {
                let mut next = cells.clone();
                let rest: Vec<usize> = cells[target].iter().copied().filter(|&u| u != v).collect();
                next.splice(target..=target, [vec![v], rest]);
                search(n, adj, next)
            })
            .min()
            .expect("non-empty cell"),
    }
}

/// Isomorphism-invariant code by individualization and refinement.
pub fn canonical_code(n: usize, adj: &[u32]) -> u64 {
    if n == 0 {
        return 0;
    }
    search(n, adj, vec![(0..n).collect()])
}

pub fn decode_code(n: usize, code: u64) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    let mut bit = 0;
    for a in 0..n {
        for b in a + 1..n {
            if code >> bit & 1 == 1 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
            bit += 1;
        }
    }
    adj
}

/// One representative per isomorphism class of graphs on `n` vertices,
/// for every `n` in `1..=max_n`.
pub fn unlabeled_graphs(max_n: usize) -> Vec<Vec<Vec<u32>>> {
    let mut levels: Vec<Vec<Vec<u32>>> = vec![vec![vec![0]]];
    for n in 2..=max_n {
        let mut codes = HashSet::new();
        let mut reps = Vec::new();
        for g in &levels[n - 2] {
            for nb in 0u32..1 << (n - 1) {
                let mut adj = g.clone();
                adj.push(nb);
                for (v, a) in adj.iter_mut().enumerate().take(n - 1) {
                    if nb >> v & 1 == 1 {
                        *a |= 1 << (n - 1);
                    }
                }
                let code = canonical_code(n, &adj);
                if codes.insert(code) {
                    reps.push(decode_code(n, code));
                }
            }
        }
        levels.push(reps);
    }
    levels
}

pub fn to_simple_graph(n: usize, adj: &[u32]) -> SimpleGraph {
    let edges = (0..n).flat_map(|a| ((a + 1)..n).filter(move |&b| adj[a] >> b & 1 == 1).map(move |b| (a, b)));
    SimpleGraph::from_edges(n, edges)
}

/// Component count by breadth-first search on an edge list.
pub fn bfs_component_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut nbrs = vec![Vec::new(); n];
    for &(a, b) in edges {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &nbrs[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    count
}

// -------------------------------------------------------------- power law

/// Degree counts `round(c * d^-2)` for `d = 1..=15` with `c` chosen so the
/// counts total about `vertices`; one degree-1 vertex is added if the degree
/// sum is odd.
pub fn planted_degree_counts(vertices: usize) -> BTreeMap<usize, usize> {
    let norm: f64 = (1..=15).map(|d| (d as f64).powi(-2)).sum();
    let c = vertices as f64 / norm;
    let mut counts: BTreeMap<usize, usize> = (1..=15).map(|d| (d, (c * (d as f64).powi(-2)).round() as usize)).collect();
    let sum: usize = counts.iter().map(|(d, n)| d * n).sum();
    if sum % 2 == 1 {
        *counts.get_mut(&1).unwrap() += 1;
    }
    counts
}

/// Simple graph realizing a degree sequence (Havel-Hakimi).
pub fn havel_hakimi(degrees: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut remaining: Vec<(usize, usize)> = degrees.iter().copied().enumerate().map(|(v, d)| (d, v)).collect();
    let mut edges = Vec::new();
    loop {
        remaining.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let (d, v) = remaining[0];
        if d == 0 {
            return Some(edges);
        }
        if d >= remaining.len() {
            return None;
        }
        remaining[0].0 = 0;
        for entry in remaining.iter_mut().skip(1).take(d) {
            if entry.0 == 0 {
                return None;
            }
            entry.0 -= 1;
            edges.push((v.min(entry.1), v.max(entry.1)));
        }
    }
}

/// Degree sequence expanded from counts, highest degree first.
pub fn degree_sequence(counts: &BTreeMap<usize, usize>) -> Vec<usize> {
    counts.iter().rev().flat_map(|(&d, &n)| std::iter::repeat_n(d, n)).collect()
}

/// Trajectories whose conflict graph is exactly `edges` on `n` flights.
///
/// Each flight idles at its own far-away grid cell and visits a private
/// meeting cell, shared only with its partner, in that edge's time slot.
/// Slots come from a greedy edge colouring, so no flight has two meetings
/// at once.
pub fn planted_flights(n: usize, edges: &[(usize, usize)]) -> FlightSet {
    let mut slot_of_vertex: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut slots = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        let s = (0..).find(|s| !slot_of_vertex[a].contains(s) && !slot_of_vertex[b].contains(s)).unwrap();
        slot_of_vertex[a].insert(s);
        slot_of_vertex[b].insert(s);
        slots.push(s);
    }
    let horizon = slots.iter().copied().max().map_or(1, |s| s + 1);
    // 1-degree grid cells within +-45 latitude are at least 42 nm apart;
    // consecutive indices step in latitude first
    let cell = |index: usize| {
        assert!(index < 91 * 360, "grid exhausted");
        let lat = -45.0 + (index % 91) as f64;
        let lon = -180.0 + (index / 91) as f64;
        (lat, lon)
    };
    let mut positions: Vec<Vec<(f64, f64)>> = (0..n).map(|v| vec![cell(v); horizon]).collect();
    for (e, (&(a, b), &s)) in edges.iter().zip(&slots).enumerate() {
        let meet = cell(n + e);
        positions[a][s] = meet;
        positions[b][s] = meet;
    }
    let width = n.to_string().len();
    let flights = positions
        .into_iter()
        .enumerate()
        .map(|(v, track)| {
            let points = track
                .into_iter()
                .map(|(lat, lon)| TrajectoryPoint::new(lat, lon, 35000.0).unwrap())
                .collect();
            Trajectory::new(format!("P{v:0width$}"), 0, points).unwrap()
        })
        .collect();
    FlightSet::new(flights).unwrap()
}
