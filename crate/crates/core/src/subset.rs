//! Top-k search inside one subset of points.
//!
//! The subset is split into one group per query keyword. Every pair of groups
//! is joined with the current k-th diameter as distance threshold, the groups
//! are ordered greedily by how many pairs survived each join, and a pruned
//! nested loop builds one-point-per-group tuples whose pairwise distances all
//! stay within the threshold.

use crate::error::{Error, Result};
use crate::geometry::distance_unchecked;
use crate::queue::{ResultEntry, ResultQueue};
use crate::types::{KeywordId, Point, PointId};

/// Points that carry at least one query keyword, in ascending id order,
/// each with a bit mask of the query positions it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Universe {
    ids: Vec<PointId>,
    coords: Vec<Vec<f64>>,
    masks: Vec<u64>,
    query_len: usize,
}

impl Universe {
    /// `points` must be sorted by id. Points covering no query keyword are
    /// dropped.
    pub fn new(points: Vec<Point>, query: &[KeywordId]) -> Result<Self> {
        if query.is_empty() || query.len() > 64 {
            return Err(Error::invalid("query must have between 1 and 64 keywords"));
        }
        let mut ids = Vec::with_capacity(points.len());
        let mut coords = Vec::with_capacity(points.len());
        let mut masks = Vec::with_capacity(points.len());
        for p in points {
            let mask = query
                .iter()
                .enumerate()
                .filter(|(_, &kw)| p.has_keyword(kw))
                .fold(0u64, |m, (i, _)| m | 1 << i);
            if mask != 0 {
                if ids.last().is_some_and(|&last| last >= p.id) {
                    return Err(Error::invalid("universe points must have ascending ids"));
                }
                ids.push(p.id);
                coords.push(p.coords);
                masks.push(mask);
            }
        }
        Ok(Universe {
            ids,
            coords,
            masks,
            query_len: query.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn query_len(&self) -> usize {
        self.query_len
    }

    pub fn full_mask(&self) -> u64 {
        if self.query_len == 64 {
            u64::MAX
        } else {
            (1u64 << self.query_len) - 1
        }
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn id(&self, local: usize) -> PointId {
        self.ids[local]
    }

    pub fn coords(&self, local: usize) -> &[f64] {
        &self.coords[local]
    }

    pub fn mask(&self, local: usize) -> u64 {
        self.masks[local]
    }

    pub fn local_of(&self, id: PointId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        distance_unchecked(&self.coords[a], &self.coords[b])
    }

    /// Whether the union of masks covers every query keyword.
    pub fn covers(&self, locals: &[usize]) -> bool {
        locals.iter().fold(0, |m, &i| m | self.masks[i]) == self.full_mask()
    }

    fn diameter_of(&self, locals: &[usize]) -> f64 {
        crate::geometry::diameter_by(locals.len(), |i, j| self.distance(locals[i], locals[j]))
    }
}

/// What to do with a completed tuple that is not a minimal covering set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidatePolicy {
    /// Greedily drop redundant points until the set is minimal.
    #[default]
    Reduce,
    /// Discard the tuple.
    Reject,
    /// Offer the distinct point set unchanged.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum GroupOrder {
    #[default]
    Greedy,
    /// Query keyword order.
    Query,
    /// Explicit permutation of query positions.
    Fixed(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubsetOptions {
    pub policy: CandidatePolicy,
    pub order: GroupOrder,
    /// Keep every id set offered to the queue.
    pub record_offers: bool,
    /// Recheck every partial tuple against the threshold from coordinates.
    pub audit_prefixes: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubsetStats {
    pub subsets_searched: u64,
    /// Completed tuples reaching the last group and passing the check
    /// against the previous group's point.
    pub tuples_examined: u64,
    pub offers: u64,
    pub join_pairs: u64,
    /// Partial tuples found to exceed the threshold (always 0).
    pub prefix_violations: u64,
    pub offer_log: Vec<Vec<PointId>>,
}

/// Pairs surviving the inner joins of one subset, keyed by subset position.
#[derive(Debug, Clone)]
pub struct JoinGraph {
    adjacency: Vec<Vec<(u32, f64)>>,
    counts: Vec<Vec<u64>>,
}

impl JoinGraph {
    /// Join every pair of groups, keeping point pairs within `threshold`.
    /// `groups` hold subset positions.
    pub fn build(universe: &Universe, subset: &[usize], groups: &[Vec<u32>], threshold: f64) -> Self {
        let q = groups.len();
        let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); subset.len()];
        let mut counts = vec![vec![0u64; q]; q];
        for i in 0..q {
            for j in i + 1..q {
                let mut n = 0;
                for &a in &groups[i] {
                    for &b in &groups[j] {
                        if a == b {
                            n += 1;
                            continue;
                        }
                        let d = universe.distance(subset[a as usize], subset[b as usize]);
                        if d <= threshold {
                            n += 1;
                            adjacency[a as usize].push((b, d));
                            adjacency[b as usize].push((a, d));
                        }
                    }
                }
                counts[i][j] = n;
                counts[j][i] = n;
            }
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(n, _)| n);
            list.dedup_by_key(|&mut (n, _)| n);
        }
        JoinGraph { adjacency, counts }
    }

    /// Recorded distance between two subset positions; 0 for a point and
    /// itself, `None` for pairs that failed the join.
    pub fn get(&self, a: u32, b: u32) -> Option<f64> {
        if a == b {
            return Some(0.0);
        }
        let list = &self.adjacency[a as usize];
        list.binary_search_by_key(&b, |&(n, _)| n).ok().map(|i| list[i].1)
    }

    /// Qualifying pair count for each pair of query positions.
    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn pair_count(&self) -> u64 {
        self.adjacency.iter().map(|l| l.len() as u64).sum::<u64>() / 2
    }
}

/// Greedy group order: repeatedly take the lightest remaining edge (ties by
/// smaller query-position pair) and append its unplaced endpoints; keywords
/// never reached are appended in query order.
pub fn order_groups(counts: &[Vec<u64>]) -> Vec<usize> {
    let q = counts.len();
    let mut edges: Vec<(u64, usize, usize)> = Vec::with_capacity(q * q.saturating_sub(1) / 2);
    for i in 0..q {
        for j in i + 1..q {
            edges.push((counts[i][j], i, j));
        }
    }
    edges.sort_unstable();
    let mut placed = vec![false; q];
    let mut order = Vec::with_capacity(q);
    for (_, i, j) in edges {
        if placed[i] && placed[j] {
            continue;
        }
        for v in [i, j] {
            if !placed[v] {
                placed[v] = true;
                order.push(v);
            }
        }
    }
    for (v, done) in placed.iter().enumerate() {
        if !done {
            order.push(v);
        }
    }
    order
}

/// Turn a completed tuple (universe indices, possibly repeated) into a result
/// entry according to `policy`. Returns `None` when the tuple is rejected or
/// does not cover the query.
pub fn canonicalize_candidate(
    universe: &Universe,
    tuple: &[usize],
    policy: CandidatePolicy,
) -> Option<ResultEntry> {
    let mut set: Vec<usize> = tuple.to_vec();
    set.sort_unstable();
    set.dedup();
    if !universe.covers(&set) {
        return None;
    }
    match policy {
        CandidatePolicy::Raw => {}
        CandidatePolicy::Reject => {
            if first_removable(universe, &set).is_some() {
                return None;
            }
        }
        CandidatePolicy::Reduce => {
            while first_removable(universe, &set).is_some() {
                let mut best: Option<(f64, PointId, usize)> = None;
                for pos in 0..set.len() {
                    if !removable(universe, &set, pos) {
                        continue;
                    }
                    let mut rest = set.clone();
                    rest.remove(pos);
                    let d = universe.diameter_of(&rest);
                    let id = universe.id(set[pos]);
                    if best.is_none_or(|(bd, bid, _)| d < bd || (d == bd && id < bid)) {
                        best = Some((d, id, pos));
                    }
                }
                let (_, _, pos) = best.expect("a removable point exists");
                set.remove(pos);
            }
        }
    }
    let diameter = universe.diameter_of(&set);
    Some(ResultEntry::new(
        set.iter().map(|&l| universe.id(l)).collect(),
        diameter,
    ))
}

fn removable(universe: &Universe, set: &[usize], pos: usize) -> bool {
    let others = set
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .fold(0, |m, (_, &l)| m | universe.mask(l));
    others == universe.full_mask()
}

fn first_removable(universe: &Universe, set: &[usize]) -> Option<usize> {
    (0..set.len()).find(|&pos| removable(universe, set, pos))
}

/// Group subset positions by query keyword. `None` if some keyword has no
/// point in the subset.
pub fn group_subset(universe: &Universe, subset: &[usize]) -> Option<Vec<Vec<u32>>> {
    let q = universe.query_len();
    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); q];
    for (pos, &local) in subset.iter().enumerate() {
        let mut mask = universe.mask(local);
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            groups[i].push(pos as u32);
            mask &= mask - 1;
        }
    }
    groups.iter().all(|g| !g.is_empty()).then_some(groups)
}

/// Search one subset (ascending universe indices) and update `queue`.
pub fn search_in_subset(
    universe: &Universe,
    subset: &[usize],
    queue: &mut ResultQueue,
    options: &SubsetOptions,
    stats: &mut SubsetStats,
) {
    stats.subsets_searched += 1;
    let Some(groups) = group_subset(universe, subset) else {
        return;
    };
    let graph = JoinGraph::build(universe, subset, &groups, queue.kth_diameter());
    stats.join_pairs += graph.pair_count();
    let order = match &options.order {
        GroupOrder::Greedy => order_groups(graph.counts()),
        GroupOrder::Query => (0..groups.len()).collect(),
        GroupOrder::Fixed(order) => {
            assert_eq!(order.len(), groups.len(), "fixed order must be a permutation");
            order.clone()
        }
    };
    let ordered: Vec<&[u32]> = order.iter().map(|&i| groups[i].as_slice()).collect();
    find_candidates(universe, subset, &ordered, &graph, queue, options, stats);
}

/// Nested-loop join over ordered groups, offering every surviving tuple.
pub fn find_candidates(
    universe: &Universe,
    subset: &[usize],
    groups: &[&[u32]],
    graph: &JoinGraph,
    queue: &mut ResultQueue,
    options: &SubsetOptions,
    stats: &mut SubsetStats,
) {
    if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
        return;
    }
    let mut search = Nested {
        universe,
        subset,
        groups,
        graph,
        queue,
        options,
        stats,
        threshold: 0.0,
        current: Vec::with_capacity(groups.len()),
        radius: vec![0.0],
    };
    search.threshold = search.queue.kth_diameter();
    search.extend(0);
}

struct Nested<'a, 'q> {
    universe: &'a Universe,
    subset: &'a [usize],
    groups: &'a [&'a [u32]],
    graph: &'a JoinGraph,
    queue: &'q mut ResultQueue,
    options: &'a SubsetOptions,
    stats: &'q mut SubsetStats,
    threshold: f64,
    current: Vec<u32>,
    /// Running diameter of each prefix of `current`.
    radius: Vec<f64>,
}

impl Nested<'_, '_> {
    fn extend(&mut self, level: usize) {
        let last_level = level + 1 == self.groups.len();
        for &o in self.groups[level] {
            // The threshold may have tightened below this prefix since it was built.
            if self.radius[level] > self.threshold {
                return;
            }
            if let Some(&last) = self.current.last() {
                match self.graph.get(last, o) {
                    Some(d) if d <= self.threshold => {}
                    _ => continue,
                }
            }
            if last_level {
                self.stats.tuples_examined += 1;
            }
            let mut radius = self.radius[level];
            let fits = self.current.iter().all(|&c| match self.graph.get(c, o) {
                Some(d) if d <= self.threshold => {
                    radius = radius.max(d);
                    true
                }
                _ => false,
            });
            if !fits {
                continue;
            }
            self.current.push(o);
            self.radius.push(radius);
            if self.options.audit_prefixes {
                self.audit();
            }
            if last_level {
                self.offer();
            } else {
                self.extend(level + 1);
            }
            self.current.pop();
            self.radius.pop();
        }
    }

    fn audit(&mut self) {
        let locals: Vec<usize> = self.current.iter().map(|&p| self.subset[p as usize]).collect();
        if self.universe.diameter_of(&locals) > self.threshold {
            self.stats.prefix_violations += 1;
        }
    }

    fn offer(&mut self) {
        let tuple: Vec<usize> = self.current.iter().map(|&p| self.subset[p as usize]).collect();
        if let Some(entry) = canonicalize_candidate(self.universe, &tuple, self.options.policy) {
            self.stats.offers += 1;
            if self.options.record_offers {
                self.stats.offer_log.push(entry.ids().to_vec());
            }
            self.queue.insert(entry);
            self.threshold = self.queue.kth_diameter();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point(id: PointId, coords: &[f64], kws: &[KeywordId]) -> Point {
        Point {
            id,
            coords: coords.to_vec(),
            keywords: kws.to_vec(),
        }
    }

    /// Groups a = {o1, o10}, b = {o3, o4}, c = {o6, o9}.
    fn weighted_groups() -> Universe {
        let (a, b, c) = (0, 1, 2);
        let pts = vec![
            point(1, &[0.0, 0.0], &[a]),
            point(3, &[0.6, 0.0], &[b]),
            point(4, &[-0.5, -0.6], &[b]),
            point(6, &[-0.9, -1.4], &[c]),
            point(9, &[0.3, 0.5], &[c]),
            point(10, &[0.6, 0.6], &[a]),
        ];
        Universe::new(pts, &[a, b, c]).unwrap()
    }

    fn dummy_queue(threshold: f64) -> ResultQueue {
        let mut q = ResultQueue::new(3);
        for i in 0..3 {
            q.insert(ResultEntry::new(vec![1000 + i], threshold));
        }
        q
    }

    fn all(u: &Universe) -> Vec<usize> {
        (0..u.len()).collect()
    }

    #[test]
    fn weighted_groups_join_weights() {
        let u = weighted_groups();
        let subset = all(&u);
        let groups = group_subset(&u, &subset).unwrap();
        let g = JoinGraph::build(&u, &subset, &groups, 1.0);
        assert_eq!(g.counts()[0][1], 3);
        assert_eq!(g.counts()[0][2], 2);
        assert_eq!(g.counts()[1][2], 2);
        assert_eq!(order_groups(g.counts()), vec![0, 2, 1]);
    }

    #[test]
    fn weighted_groups_query_order_examines_false_candidate() {
        let u = weighted_groups();
        let mut q = dummy_queue(1.0);
        let mut stats = SubsetStats::default();
        let opts = SubsetOptions {
            order: GroupOrder::Query,
            record_offers: true,
            ..SubsetOptions::default()
        };
        search_in_subset(&u, &all(&u), &mut q, &opts, &mut stats);
        assert_eq!(stats.tuples_examined, 3);
        let mut offered = stats.offer_log.clone();
        offered.sort();
        assert_eq!(offered, vec![vec![1, 3, 9], vec![3, 9, 10]]);
    }

    #[test]
    fn weighted_groups_greedy_order() {
        let u = weighted_groups();
        let mut q = dummy_queue(1.0);
        let mut stats = SubsetStats::default();
        let opts = SubsetOptions {
            record_offers: true,
            ..SubsetOptions::default()
        };
        search_in_subset(&u, &all(&u), &mut q, &opts, &mut stats);
        assert!(stats.tuples_examined >= 2 && stats.tuples_examined <= 3);
        assert_eq!(stats.tuples_examined, 2);
        let mut offered = stats.offer_log.clone();
        offered.sort();
        assert_eq!(offered, vec![vec![1, 3, 9], vec![3, 9, 10]]);
        let top: Vec<&[u64]> = q.entries().iter().take(2).map(|e| e.ids()).collect();
        assert!(top.contains(&&[1, 3, 9][..]) && top.contains(&&[3, 9, 10][..]));
    }

    #[test]
    fn order_hand_traces() {
        // ab = 5, ac = 1, bc = 9: take ac, then ab.
        let w = vec![vec![0, 5, 1], vec![5, 0, 9], vec![1, 9, 0]];
        assert_eq!(order_groups(&w), vec![0, 2, 1]);
        assert_eq!(order_groups(&[vec![0]]), vec![0]);
        // Zero-weight edge first.
        let w = vec![
            vec![0, 4, 4, 4],
            vec![4, 0, 4, 4],
            vec![4, 4, 0, 0],
            vec![4, 4, 0, 0],
        ];
        assert_eq!(order_groups(&w), vec![2, 3, 0, 1]);
    }

    #[test]
    fn uncoverable_subset_leaves_queue() {
        let u = Universe::new(
            vec![point(1, &[0.0], &[0]), point(2, &[1.0], &[1])],
            &[0, 1, 2],
        )
        .unwrap();
        let mut q = ResultQueue::with_sentinels(2);
        let before = q.clone();
        search_in_subset(&u, &all(&u), &mut q, &SubsetOptions::default(), &mut SubsetStats::default());
        assert_eq!(q, before);
    }

    #[test]
    fn canonical_forms() {
        let u = Universe::new(
            vec![
                point(1, &[0.0, 0.0], &[0, 1]),
                point(2, &[1.0, 0.0], &[2]),
                point(3, &[0.0, 5.0], &[1]),
            ],
            &[0, 1, 2],
        )
        .unwrap();
        let e = canonicalize_candidate(&u, &[0, 0, 1], CandidatePolicy::Reduce).unwrap();
        assert_eq!(e.ids(), &[1, 2]);
        assert_eq!(e.diameter(), 1.0);
        let e = canonicalize_candidate(&u, &[0, 2, 1], CandidatePolicy::Reduce).unwrap();
        assert_eq!(e.ids(), &[1, 2]);
        assert!(canonicalize_candidate(&u, &[0, 2, 1], CandidatePolicy::Reject).is_none());
        let raw = canonicalize_candidate(&u, &[0, 2, 1], CandidatePolicy::Raw).unwrap();
        assert_eq!(raw.ids(), &[1, 2, 3]);
    }

    fn random_universe(rng: &mut ChaCha8Rng, n: usize, q: usize, u: u32) -> Universe {
        let pts = (0..n as u64)
            .map(|id| {
                let t = rng.random_range(1..=2);
                let mut kws: Vec<KeywordId> = (0..t).map(|_| rng.random_range(0..u)).collect();
                kws.sort_unstable();
                kws.dedup();
                let coords: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..10.0)).collect();
                point(id, &coords, &kws)
            })
            .collect();
        let query: Vec<KeywordId> = (0..q as u32).collect();
        Universe::new(pts, &query).unwrap()
    }

    /// Every minimal covering set, by scanning all subsets of size ≤ q.
    fn power_set_candidates(u: &Universe) -> Vec<ResultEntry> {
        let n = u.len();
        let q = u.query_len();
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        fn rec(u: &Universe, start: usize, n: usize, q: usize, stack: &mut Vec<usize>, out: &mut Vec<ResultEntry>) {
            if !stack.is_empty() && u.covers(stack) {
                let minimal = (0..stack.len()).all(|skip| {
                    let rest: Vec<usize> = stack
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &l)| l)
                        .collect();
                    !u.covers(&rest)
                });
                if minimal {
                    let mut best = 0.0f64;
                    for &a in stack.iter() {
                        for &b in stack.iter() {
                            best = best.max(u.distance(a, b));
                        }
                    }
                    out.push(ResultEntry::new(stack.iter().map(|&l| u.id(l)).collect(), best));
                }
                return;
            }
            if stack.len() == q {
                return;
            }
            for i in start..n {
                stack.push(i);
                rec(u, i + 1, n, q, stack, out);
                stack.pop();
            }
        }
        rec(u, 0, n, q, &mut stack, &mut out);
        out
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..100 {
            let q = rng.random_range(1..=3);
            let n = rng.random_range(1..=14);
            let k = rng.random_range(1..=4);
            let u = random_universe(&mut rng, n, q, 4);
            let mut expect = ResultQueue::with_sentinels(k);
            for e in power_set_candidates(&u) {
                expect.insert(e);
            }
            let mut got = ResultQueue::with_sentinels(k);
            search_in_subset(&u, &all(&u), &mut got, &SubsetOptions::default(), &mut SubsetStats::default());
            assert_eq!(got.entries(), expect.entries(), "trial {trial}");
        }
    }

    #[test]
    fn reduced_candidates_are_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let u = random_universe(&mut rng, 6, 4, 4);
            if u.is_empty() {
                continue;
            }
            let tuple: Vec<usize> = (0..4).map(|_| rng.random_range(0..u.len())).collect();
            let Some(e) = canonicalize_candidate(&u, &tuple, CandidatePolicy::Reduce) else {
                continue;
            };
            let locals: Vec<usize> = e.ids().iter().map(|&id| u.local_of(id).unwrap()).collect();
            assert!(u.covers(&locals));
            for mask in 0..(1u32 << locals.len()) - 1 {
                let sub: Vec<usize> = (0..locals.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| locals[i])
                    .collect();
                assert!(!u.covers(&sub));
            }
        }
    }

    proptest! {
        #[test]
        fn group_permutation_keeps_answers(seed in 0u64..10_000, perm in 0usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_universe(&mut rng, 20, 3, 3);
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let mut base = ResultQueue::with_sentinels(3);
            search_in_subset(&u, &all(&u), &mut base, &SubsetOptions::default(), &mut SubsetStats::default());
            let mut other = ResultQueue::with_sentinels(3);
            let opts = SubsetOptions { order: GroupOrder::Fixed(perms[perm].to_vec()), ..SubsetOptions::default() };
            search_in_subset(&u, &all(&u), &mut other, &opts, &mut SubsetStats::default());
            prop_assert_eq!(base.entries(), other.entries());
        }

        #[test]
        fn prefixes_stay_within_threshold(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_universe(&mut rng, 25, 3, 4);
            let mut q = ResultQueue::with_sentinels(2);
            let mut stats = SubsetStats::default();
            let opts = SubsetOptions { audit_prefixes: true, ..SubsetOptions::default() };
            search_in_subset(&u, &all(&u), &mut q, &opts, &mut stats);
            prop_assert_eq!(stats.prefix_violations, 0);
        }

        #[test]
        fn join_is_symmetric(seed in 0u64..10_000, threshold in 0.5f64..8.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_universe(&mut rng, 20, 3, 3);
            let subset = all(&u);
            if let Some(groups) = group_subset(&u, &subset) {
                let g = JoinGraph::build(&u, &subset, &groups, threshold);
                for a in 0..subset.len() as u32 {
                    for b in 0..subset.len() as u32 {
                        prop_assert_eq!(g.get(a, b), g.get(b, a));
                    }
                }
            }
        }
    }
}
