use std::convert::Infallible;

use super::graph::bits;
use super::{PercolationError, PollutionSet, SimpleGraph};

/// Decides which cliques may serve as the base of a new edge.
///
/// Within a round the graph is frozen: `accept` and `finish` must judge
/// against the state as of the start of the round and defer any side effects
/// to `commit`, which runs once per added edge after the round closes.
pub trait BaseRule {
    type Error;

    /// Returns `true` to skip every base that would contain `prefix` plus `next`.
    fn prune(&mut self, _prefix: &[usize], _next: usize) -> bool {
        false
    }

    /// Called for each clique `base` (sorted) inside the common neighbourhood
    /// of `u < v`, in lexicographic order, until it returns `true`.
    fn accept(&mut self, u: usize, v: usize, base: &[usize]) -> Result<bool, Self::Error>;

    /// Called after the search for `uv` exhausts every base without acceptance.
    fn finish(&mut self, _u: usize, _v: usize) -> Result<bool, Self::Error> {
        Ok(false)
    }

    fn commit(&mut self, _u: usize, _v: usize) {}
}

/// Plain `K_s` percolation: every clique is a valid base.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnyBase;

impl BaseRule for AnyBase {
    type Error = Infallible;

    fn accept(&mut self, _: usize, _: usize, _: &[usize]) -> Result<bool, Infallible> {
        Ok(true)
    }
}

/// Polluted percolation: bases in the family are refused.
#[derive(Debug, Clone, Copy)]
pub struct AvoidPolluted<'a>(pub &'a PollutionSet);

impl BaseRule for AvoidPolluted<'_> {
    type Error = Infallible;

    fn accept(&mut self, _: usize, _: usize, base: &[usize]) -> Result<bool, Infallible> {
        Ok(!self.0.contains_sorted(base))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClosureStats {
    /// Rounds in which at least one edge was added.
    pub rounds: usize,
    pub added: usize,
}

/// `<G>_{K_s}` for `s = clique_size`.
///
/// # Panics
/// If `clique_size < 3`.
pub fn closure(g: &SimpleGraph, clique_size: usize) -> SimpleGraph {
    assert!(clique_size >= 3, "clique size must be at least 3");
    let mut out = g.clone();
    let k = clique_size - 2;
    let mut seeds: Vec<usize> = (0..out.n()).collect();
    seeds.sort_by_key(|&v| std::cmp::Reverse(out.degree(v)));
    let mut covered = vec![false; out.n()];
    for &seed in &seeds {
        if covered[seed] {
            continue;
        }
        let clique = absorb(&mut out, seed, k);
        if clique.len() == out.n() {
            return out;
        }
        for c in clique {
            covered[c] = true;
        }
    }
    let Ok(_) = run_closure(&mut out, k, &mut AnyBase);
    out
}

/// Grows a clique greedily inside the neighbourhood of `seed`, then absorbs
/// every vertex with at least `k` neighbours in it: such a vertex gains an
/// edge to each other clique member through those `k` neighbours. Returns
/// the final clique.
fn absorb(g: &mut SimpleGraph, seed: usize, k: usize) -> Vec<usize> {
    let n = g.n();
    let mut clique = vec![seed];
    let mut cand = g.row(seed).to_vec();
    while let Some(x) = bits(&cand)
        .map(|x| {
            let inside: u32 = cand.iter().zip(g.row(x)).map(|(a, b)| (a & b).count_ones()).sum();
            (inside, std::cmp::Reverse(x))
        })
        .max()
        .map(|(_, std::cmp::Reverse(x))| x)
    {
        clique.push(x);
        for (c, r) in cand.iter_mut().zip(g.row(x)) {
            *c &= r;
        }
    }
    let mut member = vec![false; n];
    let mut count = vec![0usize; n];
    for &c in &clique {
        member[c] = true;
        for y in g.neighbors(c) {
            count[y] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&y| !member[y] && count[y] >= k).collect();
    while let Some(x) = queue.pop() {
        if member[x] {
            continue;
        }
        for y in g.neighbors(x).collect::<Vec<_>>() {
            if !member[y] {
                count[y] += 1;
                if count[y] == k {
                    queue.push(y);
                }
            }
        }
        for &c in &clique {
            g.add_edge(x, c);
        }
        member[x] = true;
        clique.push(x);
    }
    clique
}

/// `<G>^P_{K_{d+3}}`: an edge needs a `(d+1)`-clique base outside `pollution`.
pub fn polluted_closure(
    g: &SimpleGraph,
    d: usize,
    pollution: &PollutionSet,
) -> Result<SimpleGraph, PercolationError> {
    if pollution.d() != d {
        return Err(PercolationError::DimensionMismatch {
            expected: d,
            got: pollution.d(),
        });
    }
    let mut out = g.clone();
    let Ok(_) = run_closure(&mut out, d + 1, &mut AvoidPolluted(pollution));
    Ok(out)
}

/// Runs synchronous rounds until no edge is addable. Each round tests its
/// candidate non-edges against the graph as it stood when the round began,
/// then adds all accepted edges together.
pub fn run_closure<R: BaseRule>(
    graph: &mut SimpleGraph,
    base_size: usize,
    rule: &mut R,
) -> Result<ClosureStats, R::Error> {
    let n = graph.n();
    let mut stats = ClosureStats::default();
    let mut search = CliqueSearch::new(graph.words(), base_size);
    let mut queued = PairMarks::new(n);
    let mut candidates: Vec<(usize, usize)> = graph
        .non_edges()
        .filter(|&(u, v)| common_count(graph, u, v) >= base_size)
        .collect();

    while !candidates.is_empty() {
        let mut added = Vec::new();
        for &(u, v) in &candidates {
            if search.find(graph, u, v, rule)? {
                added.push((u, v));
            }
        }
        if added.is_empty() {
            break;
        }
        for &(u, v) in &added {
            graph.add_edge(u, v);
            rule.commit(u, v);
        }
        stats.rounds += 1;
        stats.added += added.len();

        candidates.clear();
        for &(x, y) in &added {
            trigger(graph, x, y, base_size, &mut queued, &mut candidates);
        }
        queued.reset();
        candidates.sort_unstable();
    }
    Ok(stats)
}

fn common_count(g: &SimpleGraph, u: usize, v: usize) -> usize {
    g.row(u)
        .iter()
        .zip(g.row(v))
        .map(|(a, b)| (a & b).count_ones() as usize)
        .sum()
}

/// Queues every non-edge whose common neighbourhood, or the graph induced
/// on it, changed when `xy` was added.
fn trigger(
    g: &SimpleGraph,
    x: usize,
    y: usize,
    base_size: usize,
    queued: &mut PairMarks,
    out: &mut Vec<(usize, usize)>,
) {
    let mut push = |a: usize, b: usize, out: &mut Vec<(usize, usize)>| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if !g.has_edge(a, b) && queued.mark(a, b) && common_count(g, a, b) >= base_size {
            out.push((a, b));
        }
    };
    for (from, to) in [(x, y), (y, x)] {
        for w in g.neighbors(to) {
            if w != from && !g.has_edge(from, w) {
                push(from, w, out);
            }
        }
    }
    if base_size >= 2 {
        let common: Vec<u64> = g.row(x).iter().zip(g.row(y)).map(|(a, b)| a & b).collect();
        for a in bits(&common) {
            let rest: Vec<u64> = common
                .iter()
                .zip(g.row(a))
                .enumerate()
                .map(|(i, (c, r))| c & !r & above(a, i))
                .collect();
            for b in bits(&rest) {
                push(a, b, out);
            }
        }
    }
}

/// Mask of bit positions in word `word` whose vertex index exceeds `a`.
fn above(a: usize, word: usize) -> u64 {
    let (aw, ab) = (a / 64, a % 64);
    match word.cmp(&aw) {
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Greater => !0,
        std::cmp::Ordering::Equal => {
            if ab == 63 {
                0
            } else {
                !0 << (ab + 1)
            }
        }
    }
}

/// Dedup marks over unordered pairs, cleared per round.
struct PairMarks {
    n: usize,
    bits: Vec<u64>,
    touched: Vec<usize>,
}

impl PairMarks {
    fn new(n: usize) -> Self {
        Self {
            n,
            bits: vec![0; (n * n).div_ceil(64)],
            touched: Vec::new(),
        }
    }

    fn mark(&mut self, a: usize, b: usize) -> bool {
        let idx = a * self.n + b;
        let (w, m) = (idx / 64, 1u64 << (idx % 64));
        if self.bits[w] & m != 0 {
            return false;
        }
        self.bits[w] |= m;
        self.touched.push(w);
        true
    }

    fn reset(&mut self) {
        for w in self.touched.drain(..) {
            self.bits[w] = 0;
        }
    }
}

/// Lexicographic search for `k`-cliques in a common neighbourhood.
struct CliqueSearch {
    words: usize,
    k: usize,
    levels: Vec<u64>,
    prefix: Vec<usize>,
}

impl CliqueSearch {
    fn new(words: usize, k: usize) -> Self {
        Self {
            words,
            k,
            levels: vec![0; (k + 1) * words],
            prefix: Vec::with_capacity(k),
        }
    }

    fn find<R: BaseRule>(
        &mut self,
        g: &SimpleGraph,
        u: usize,
        v: usize,
        rule: &mut R,
    ) -> Result<bool, R::Error> {
        let (ru, rv) = (g.row(u), g.row(v));
        for i in 0..self.words {
            self.levels[i] = ru[i] & rv[i];
        }
        self.prefix.clear();
        if self.extend(g, u, v, 0, rule)? {
            return Ok(true);
        }
        rule.finish(u, v)
    }

    fn extend<R: BaseRule>(
        &mut self,
        g: &SimpleGraph,
        u: usize,
        v: usize,
        depth: usize,
        rule: &mut R,
    ) -> Result<bool, R::Error> {
        if depth == self.k {
            return rule.accept(u, v, &self.prefix);
        }
        let need = self.k - depth;
        let w = self.words;
        let level = depth * w;
        let mut remaining: usize = self.levels[level..level + w]
            .iter()
            .map(|x| x.count_ones() as usize)
            .sum();
        for wi in 0..w {
            let mut word = self.levels[level + wi];
            while word != 0 {
                if remaining < need {
                    return Ok(false);
                }
                let x = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                remaining -= 1;
                if rule.prune(&self.prefix, x) {
                    continue;
                }
                let next = level + w;
                let row = g.row(x);
                let mut count = 0;
                for j in 0..w {
                    let bitsj = self.levels[level + j] & row[j] & above(x, j);
                    self.levels[next + j] = bitsj;
                    count += bitsj.count_ones() as usize;
                }
                if count + 1 < need {
                    continue;
                }
                self.prefix.push(x);
                let found = self.extend(g, u, v, depth + 1, rule)?;
                self.prefix.pop();
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_minus_edge_closes() {
        let mut g = SimpleGraph::complete(4);
        g.remove_edge(0, 1);
        let c = closure(&g, 4);
        assert!(c.is_complete());
    }

    #[test]
    fn stats_count_rounds_and_edges() {
        // a path of triangles closes one diagonal per round
        let mut g = SimpleGraph::complete(4);
        g.remove_edge(1, 2);
        let mut h = g.clone();
        let stats = run_closure(&mut h, 2, &mut AnyBase).unwrap();
        assert_eq!(
            stats,
            ClosureStats {
                rounds: 1,
                added: 1
            }
        );
        let mut empty = SimpleGraph::empty(5);
        assert_eq!(
            run_closure(&mut empty, 2, &mut AnyBase).unwrap(),
            ClosureStats::default()
        );
    }

    #[test]
    fn above_masks() {
        assert_eq!(above(0, 0), !1);
        assert_eq!(above(63, 0), 0);
        assert_eq!(above(63, 1), !0);
        assert_eq!(above(70, 0), 0);
        assert_eq!(above(70, 1), !0 << 7);
    }
}
