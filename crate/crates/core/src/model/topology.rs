use std::collections::{BTreeSet, VecDeque};

use super::scenario::Scenario;
use crate::error::TopologyError;

/// Line sets on the unique path from the slack bus to every bus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSets {
    /// `paths[i - 1]` holds the line ids on the path 0 -> i.
    paths: Vec<BTreeSet<usize>>,
    /// Parent bus of every bus (entry 0 is the slack and has none).
    parent: Vec<Option<usize>>,
}

impl PathSets {
    pub fn bus_count(&self) -> usize {
        self.paths.len()
    }

    /// Lines between bus 0 and `bus` (1-based bus index).
    pub fn path(&self, bus: usize) -> &BTreeSet<usize> {
        &self.paths[bus - 1]
    }

    pub fn parent(&self, bus: usize) -> Option<usize> {
        self.parent[bus]
    }

    /// Lines shared by the paths to `a` and `b`.
    pub fn common(&self, a: usize, b: usize) -> impl Iterator<Item = &usize> {
        self.path(a).intersection(self.path(b))
    }
}

/// Walks the network breadth-first from bus 0 and records each bus's path.
///
/// Lines are treated as undirected. Any edge that closes a loop is reported
/// together with the tree lines forming that loop.
pub fn build_path_sets(scenario: &Scenario) -> Result<PathSets, TopologyError> {
    let n = scenario.m + 1;
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, line) in scenario.lines.iter().enumerate() {
        for bus in [line.from, line.to] {
            if bus >= n {
                return Err(TopologyError::BusOutOfRange {
                    line: id,
                    bus,
                    max_bus: scenario.m,
                });
            }
        }
        if line.from == line.to {
            return Err(TopologyError::SelfLoop { line: id, bus: line.from });
        }
        adjacency[line.from].push((line.to, id));
        adjacency[line.to].push((line.from, id));
    }

    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut parent_line: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, line) in &adjacency[u] {
            if parent_line[u] == Some(line) {
                continue;
            }
            if visited[v] {
                return Err(TopologyError::Cycle {
                    lines: cycle_lines(&parent, &parent_line, u, v, line),
                });
            }
            visited[v] = true;
            parent[v] = Some(u);
            parent_line[v] = Some(line);
            queue.push_back(v);
        }
    }

    let orphans: Vec<usize> = (1..n).filter(|&b| !visited[b]).collect();
    if !orphans.is_empty() {
        return Err(TopologyError::Disconnected { buses: orphans });
    }

    let paths = (1..n)
        .map(|bus| {
            let mut set = BTreeSet::new();
            let mut cur = bus;
            while let Some(line) = parent_line[cur] {
                set.insert(line);
                cur = parent[cur].expect("tree edge has a parent");
            }
            set
        })
        .collect();
    Ok(PathSets { paths, parent })
}

fn root_path(parent: &[Option<usize>], parent_line: &[Option<usize>], mut bus: usize) -> BTreeSet<usize> {
    let mut lines = BTreeSet::new();
    while let (Some(p), Some(l)) = (parent[bus], parent_line[bus]) {
        lines.insert(l);
        bus = p;
    }
    lines
}

fn cycle_lines(
    parent: &[Option<usize>],
    parent_line: &[Option<usize>],
    u: usize,
    v: usize,
    closing: usize,
) -> Vec<usize> {
    let pu = root_path(parent, parent_line, u);
    let pv = root_path(parent, parent_line, v);
    let mut lines: BTreeSet<usize> = pu.symmetric_difference(&pv).copied().collect();
    lines.insert(closing);
    lines.into_iter().collect()
}
