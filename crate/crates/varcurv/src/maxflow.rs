//! Max-flow / min-cut via the Boykov–Kolmogorov search-tree algorithm,
//! with integer capacities so that optimality, tie-breaking and the
//! lattice of minimum cuts are exact.
//!
//! Terminal capacities are stored netted per node (`tr_cap > 0`: residual
//! from the source, `< 0`: residual to the sink). After `maxflow()`, the
//! inclusion-minimal minimum cut is the set of nodes reachable from the
//! source in the residual graph and the inclusion-maximal one is the
//! complement of the nodes that can still reach the sink.

use std::collections::VecDeque;

const NONE: u32 = u32::MAX;
const TERMINAL: u32 = u32::MAX - 1;
const ORPHAN: u32 = u32::MAX - 2;

const FREE: u8 = 0;
const TREE_S: u8 = 1;
const TREE_T: u8 = 2;

pub struct MaxFlow {
    first: Vec<u32>,
    arc_head: Vec<u32>,
    arc_next: Vec<u32>,
    arc_rcap: Vec<i64>,
    tr_cap: Vec<i64>,
    flow: i64,

    parent: Vec<u32>,
    tree: Vec<u8>,
    ts: Vec<u32>,
    dist: Vec<u32>,
    time: u32,
    active: VecDeque<u32>,
    orphans: VecDeque<u32>,
}

impl MaxFlow {
    pub fn new(n_nodes: usize, n_edges_hint: usize) -> MaxFlow {
        MaxFlow {
            first: vec![NONE; n_nodes],
            arc_head: Vec::with_capacity(2 * n_edges_hint),
            arc_next: Vec::with_capacity(2 * n_edges_hint),
            arc_rcap: Vec::with_capacity(2 * n_edges_hint),
            tr_cap: vec![0; n_nodes],
            flow: 0,
            parent: Vec::new(),
            tree: Vec::new(),
            ts: Vec::new(),
            dist: Vec::new(),
            time: 0,
            active: VecDeque::new(),
            orphans: VecDeque::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.first.len()
    }

    /// Undirected n-link with capacity `cap` in both directions.
    pub fn add_edge(&mut self, i: u32, j: u32, cap_ij: i64, cap_ji: i64) {
        debug_assert!(i != j);
        let a = self.arc_head.len() as u32;
        self.arc_head.push(j);
        self.arc_next.push(self.first[i as usize]);
        self.arc_rcap.push(cap_ij);
        self.first[i as usize] = a;
        let b = a + 1;
        self.arc_head.push(i);
        self.arc_next.push(self.first[j as usize]);
        self.arc_rcap.push(cap_ji);
        self.first[j as usize] = b;
        debug_assert_eq!(b ^ 1, a);
    }

    /// Net terminal capacity: positive toward the source, negative toward
    /// the sink.
    pub fn add_tweight(&mut self, i: u32, source_minus_sink: i64) {
        self.tr_cap[i as usize] += source_minus_sink;
    }

    #[inline]
    fn tail(&self, arc: u32) -> u32 {
        self.arc_head[(arc ^ 1) as usize]
    }

    pub fn maxflow(&mut self) -> i64 {
        let n = self.first.len();
        self.parent = vec![NONE; n];
        self.tree = vec![FREE; n];
        self.ts = vec![0; n];
        self.dist = vec![0; n];
        self.time = 0;
        self.active.clear();
        self.orphans.clear();
        for i in 0..n {
            if self.tr_cap[i] > 0 {
                self.tree[i] = TREE_S;
                self.parent[i] = TERMINAL;
                self.dist[i] = 1;
                self.active.push_back(i as u32);
            } else if self.tr_cap[i] < 0 {
                self.tree[i] = TREE_T;
                self.parent[i] = TERMINAL;
                self.dist[i] = 1;
                self.active.push_back(i as u32);
            }
        }

        loop {
            let connect = self.grow();
            match connect {
                None => break,
                Some(arc) => {
                    self.time += 1;
                    self.augment(arc);
                    self.adopt();
                }
            }
        }
        self.flow
    }

    /// Growth phase: returns a connecting arc (from an S node to a T node,
    /// with residual capacity) or None when no augmenting path exists.
    fn grow(&mut self) -> Option<u32> {
        while let Some(i) = self.active.front().copied() {
            let it = self.tree[i as usize];
            if it == FREE {
                self.active.pop_front();
                continue;
            }
            let mut a = self.first[i as usize];
            while a != NONE {
                let j = self.arc_head[a as usize];
                let usable = if it == TREE_S {
                    self.arc_rcap[a as usize] > 0
                } else {
                    self.arc_rcap[(a ^ 1) as usize] > 0
                };
                if usable {
                    let jt = self.tree[j as usize];
                    if jt == FREE {
                        self.tree[j as usize] = it;
                        self.parent[j as usize] = a ^ 1;
                        self.ts[j as usize] = self.ts[i as usize];
                        self.dist[j as usize] = self.dist[i as usize] + 1;
                        self.active.push_back(j);
                    } else if jt != it {
                        // path found; keep i active for the next round
                        return Some(if it == TREE_S { a } else { a ^ 1 });
                    } else if self.ts[j as usize] <= self.ts[i as usize]
                        && self.dist[j as usize] > self.dist[i as usize] + 1
                    {
                        // shorter-path heuristic
                        self.parent[j as usize] = a ^ 1;
                        self.ts[j as usize] = self.ts[i as usize];
                        self.dist[j as usize] = self.dist[i as usize] + 1;
                    }
                }
                a = self.arc_next[a as usize];
            }
            self.active.pop_front();
        }
        None
    }

    fn augment(&mut self, connect: u32) {
        // bottleneck
        let mut bottleneck = self.arc_rcap[connect as usize];
        let mut x = self.tail(connect);
        loop {
            let pa = self.parent[x as usize];
            if pa == TERMINAL {
                bottleneck = bottleneck.min(self.tr_cap[x as usize]);
                break;
            }
            bottleneck = bottleneck.min(self.arc_rcap[(pa ^ 1) as usize]);
            x = self.arc_head[pa as usize];
        }
        let mut y = self.arc_head[connect as usize];
        loop {
            let pa = self.parent[y as usize];
            if pa == TERMINAL {
                bottleneck = bottleneck.min(-self.tr_cap[y as usize]);
                break;
            }
            bottleneck = bottleneck.min(self.arc_rcap[pa as usize]);
            y = self.arc_head[pa as usize];
        }
        debug_assert!(bottleneck > 0);

        // push
        self.arc_rcap[connect as usize] -= bottleneck;
        self.arc_rcap[(connect ^ 1) as usize] += bottleneck;
        let mut x = self.tail(connect);
        loop {
            let pa = self.parent[x as usize];
            if pa == TERMINAL {
                self.tr_cap[x as usize] -= bottleneck;
                if self.tr_cap[x as usize] == 0 {
                    self.parent[x as usize] = ORPHAN;
                    self.orphans.push_back(x);
                }
                break;
            }
            self.arc_rcap[pa as usize] += bottleneck;
            self.arc_rcap[(pa ^ 1) as usize] -= bottleneck;
            if self.arc_rcap[(pa ^ 1) as usize] == 0 {
                self.parent[x as usize] = ORPHAN;
                self.orphans.push_back(x);
            }
            x = self.arc_head[pa as usize];
        }
        let mut y = self.arc_head[connect as usize];
        loop {
            let pa = self.parent[y as usize];
            if pa == TERMINAL {
                self.tr_cap[y as usize] += bottleneck;
                if self.tr_cap[y as usize] == 0 {
                    self.parent[y as usize] = ORPHAN;
                    self.orphans.push_back(y);
                }
                break;
            }
            self.arc_rcap[pa as usize] -= bottleneck;
            self.arc_rcap[(pa ^ 1) as usize] += bottleneck;
            if self.arc_rcap[pa as usize] == 0 {
                self.parent[y as usize] = ORPHAN;
                self.orphans.push_back(y);
            }
            y = self.arc_head[pa as usize];
        }
        self.flow += bottleneck;
    }

    /// Distance to the terminal through valid parents, or None if the
    /// chain ends at an orphan/free node. Marks the walked chain with the
    /// current timestamp on success.
    fn origin_distance(&mut self, start: u32) -> Option<u32> {
        let mut d = 0u32;
        let mut x = start;
        loop {
            if self.ts[x as usize] == self.time {
                d += self.dist[x as usize];
                break;
            }
            let pa = self.parent[x as usize];
            if pa == TERMINAL {
                d += 1;
                break;
            }
            if pa == ORPHAN || pa == NONE {
                return None;
            }
            d += 1;
            x = self.arc_head[pa as usize];
        }
        // second walk: stamp distances along the chain
        let mut dd = d;
        let mut x = start;
        while self.ts[x as usize] != self.time {
            self.ts[x as usize] = self.time;
            self.dist[x as usize] = dd;
            let pa = self.parent[x as usize];
            if pa == TERMINAL {
                break;
            }
            dd -= 1;
            x = self.arc_head[pa as usize];
        }
        Some(d)
    }

    fn adopt(&mut self) {
        while let Some(o) = self.orphans.pop_front() {
            let ot = self.tree[o as usize];
            debug_assert!(ot != FREE);
            // try to find a new parent among same-tree neighbors with
            // residual capacity toward the terminal
            let mut best_arc = NONE;
            let mut best_d = u32::MAX;
            let mut a = self.first[o as usize];
            while a != NONE {
                let j = self.arc_head[a as usize];
                if self.tree[j as usize] == ot {
                    let carries = if ot == TREE_S {
                        self.arc_rcap[(a ^ 1) as usize] > 0
                    } else {
                        self.arc_rcap[a as usize] > 0
                    };
                    if carries {
                        if let Some(d) = self.origin_distance(j) {
                            if d < best_d {
                                best_d = d;
                                best_arc = a;
                            }
                        }
                    }
                }
                a = self.arc_next[a as usize];
            }
            if best_arc != NONE {
                self.parent[o as usize] = best_arc;
                self.ts[o as usize] = self.time;
                self.dist[o as usize] = best_d + 1;
                continue;
            }
            // no parent: o leaves the tree; its tree neighbors may need
            // processing
            let mut a = self.first[o as usize];
            while a != NONE {
                let j = self.arc_head[a as usize];
                if self.tree[j as usize] == ot {
                    let carries = if ot == TREE_S {
                        self.arc_rcap[(a ^ 1) as usize] > 0
                    } else {
                        self.arc_rcap[a as usize] > 0
                    };
                    if carries {
                        self.active.push_back(j);
                    }
                    let pj = self.parent[j as usize];
                    if pj != TERMINAL && pj != ORPHAN && pj != NONE
                        && self.arc_head[pj as usize] == o
                    {
                        self.parent[j as usize] = ORPHAN;
                        self.orphans.push_back(j);
                    }
                }
                a = self.arc_next[a as usize];
            }
            self.tree[o as usize] = FREE;
            self.parent[o as usize] = NONE;
        }
    }

    /// Inclusion-minimal minimum cut: nodes reachable from the source in
    /// the residual graph. Call after `maxflow`.
    pub fn min_source_side(&self) -> Vec<bool> {
        let n = self.first.len();
        let mut side = vec![false; n];
        let mut queue = VecDeque::new();
        for i in 0..n {
            if self.tr_cap[i] > 0 {
                side[i] = true;
                queue.push_back(i as u32);
            }
        }
        while let Some(i) = queue.pop_front() {
            let mut a = self.first[i as usize];
            while a != NONE {
                if self.arc_rcap[a as usize] > 0 {
                    let j = self.arc_head[a as usize];
                    if !side[j as usize] {
                        side[j as usize] = true;
                        queue.push_back(j);
                    }
                }
                a = self.arc_next[a as usize];
            }
        }
        side
    }

    /// Inclusion-maximal minimum cut: complement of the nodes that can
    /// still reach the sink in the residual graph.
    pub fn max_source_side(&self) -> Vec<bool> {
        let n = self.first.len();
        let mut to_sink = vec![false; n];
        let mut queue = VecDeque::new();
        for i in 0..n {
            if self.tr_cap[i] < 0 {
                to_sink[i] = true;
                queue.push_back(i as u32);
            }
        }
        while let Some(i) = queue.pop_front() {
            // j reaches the sink if the arc j -> i has residual capacity
            let mut a = self.first[i as usize];
            while a != NONE {
                if self.arc_rcap[(a ^ 1) as usize] > 0 {
                    let j = self.arc_head[a as usize];
                    if !to_sink[j as usize] {
                        to_sink[j as usize] = true;
                        queue.push_back(j);
                    }
                }
                a = self.arc_next[a as usize];
            }
        }
        to_sink.iter().map(|&b| !b).collect()
    }
}
