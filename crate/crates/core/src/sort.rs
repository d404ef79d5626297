//! Sorts, the subsort DAG and its partition into kinds.
//!
//! A [`SortGraph`] is an immutable value: every constructor returns a graph
//! whose transitive closure and kind partition are already computed, so the
//! queries ([`SortGraph::is_subsort`], [`SortGraph::kind_of`]) are simple
//! lookups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, ErrorKind, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortName(String);

impl SortName {
    pub fn new(name: impl Into<String>) -> Self {
        SortName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SortName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SortName {
    fn from(s: &str) -> Self {
        SortName::new(s)
    }
}

/// Identifies a connected component of the sort graph by its least sort name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KindId(SortName);

impl KindId {
    pub fn least_sort(&self) -> &SortName {
        &self.0
    }
}

impl fmt::Display for KindId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SortDecl {
    Sort(SortName),
    Subsort(SortName, SortName),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortGraph {
    sorts: BTreeSet<SortName>,
    edges: BTreeSet<(SortName, SortName)>,
    // reflexive-transitive upward closure
    above: BTreeMap<SortName, BTreeSet<SortName>>,
    kinds: BTreeMap<SortName, KindId>,
}

impl SortGraph {
    pub fn new() -> Self {
        SortGraph::default()
    }

    /// Builds a graph from sort and subsort declarations in any order.
    /// Subsort declarations implicitly declare their endpoints.
    pub fn build<I>(decls: I) -> Result<SortGraph>
    where
        I: IntoIterator<Item = SortDecl>,
    {
        let mut sorts = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for decl in decls {
            match decl {
                SortDecl::Sort(s) => {
                    sorts.insert(s);
                }
                SortDecl::Subsort(a, b) => {
                    sorts.insert(a.clone());
                    sorts.insert(b.clone());
                    edges.insert((a, b));
                }
            }
        }
        SortGraph::from_parts(sorts, edges)
    }

    fn from_parts(
        sorts: BTreeSet<SortName>,
        edges: BTreeSet<(SortName, SortName)>,
    ) -> Result<SortGraph> {
        let mut successors: BTreeMap<&SortName, Vec<&SortName>> = BTreeMap::new();
        for (a, b) in &edges {
            successors.entry(a).or_default().push(b);
        }
        if let Some(cycle) = find_cycle(&sorts, &successors) {
            return Err(Error::new(ErrorKind::Cycle(cycle)));
        }

        let mut above = BTreeMap::new();
        for s in &sorts {
            let mut seen = BTreeSet::new();
            let mut stack = vec![s];
            while let Some(cur) = stack.pop() {
                if seen.insert(cur.clone()) {
                    if let Some(next) = successors.get(cur) {
                        stack.extend(next.iter().copied());
                    }
                }
            }
            above.insert(s.clone(), seen);
        }

        let kinds = components(&sorts, &edges);
        Ok(SortGraph {
            sorts,
            edges,
            above,
            kinds,
        })
    }

    pub fn with_sort(&self, s: SortName) -> SortGraph {
        if self.sorts.contains(&s) {
            return self.clone();
        }
        let mut sorts = self.sorts.clone();
        sorts.insert(s);
        SortGraph::from_parts(sorts, self.edges.clone()).expect("adding a sort cannot close a cycle")
    }

    pub fn with_subsort(&self, lesser: SortName, greater: SortName) -> Result<SortGraph> {
        let mut sorts = self.sorts.clone();
        let mut edges = self.edges.clone();
        sorts.insert(lesser.clone());
        sorts.insert(greater.clone());
        edges.insert((lesser, greater));
        SortGraph::from_parts(sorts, edges)
    }

    /// Union of both graphs.
    pub fn merge(&self, other: &SortGraph) -> Result<SortGraph> {
        if other.sorts.is_subset(&self.sorts) && other.edges.is_subset(&self.edges) {
            return Ok(self.clone());
        }
        let sorts = self.sorts.union(&other.sorts).cloned().collect();
        let edges = self.edges.union(&other.edges).cloned().collect();
        SortGraph::from_parts(sorts, edges)
    }

    pub fn sorts(&self) -> impl Iterator<Item = &SortName> {
        self.sorts.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&SortName, &SortName)> {
        self.edges.iter().map(|(a, b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.sorts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorts.is_empty()
    }

    pub fn contains(&self, s: &SortName) -> bool {
        self.sorts.contains(s)
    }

    pub fn check(&self, s: &SortName) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::new(ErrorKind::UnknownSort(s.clone())))
        }
    }

    /// Reflexive-transitive subsort test.
    pub fn is_subsort(&self, a: &SortName, b: &SortName) -> Result<bool> {
        self.check(b)?;
        match self.above.get(a) {
            Some(up) => Ok(up.contains(b)),
            None => Err(Error::new(ErrorKind::UnknownSort(a.clone()))),
        }
    }

    /// Like [`SortGraph::is_subsort`] but treats undeclared sorts as unrelated.
    pub fn leq(&self, a: &SortName, b: &SortName) -> bool {
        self.above.get(a).is_some_and(|up| up.contains(b))
    }

    pub fn kind_of(&self, s: &SortName) -> Result<KindId> {
        self.kinds
            .get(s)
            .cloned()
            .ok_or_else(|| Error::new(ErrorKind::UnknownSort(s.clone())))
    }

    pub fn kind_count(&self) -> usize {
        self.kinds.values().collect::<BTreeSet<_>>().len()
    }

    /// All sorts belonging to `kind`, in name order.
    pub fn sorts_of_kind<'a>(&'a self, kind: &KindId) -> impl Iterator<Item = &'a SortName> + 'a {
        let kind = kind.clone();
        self.kinds
            .iter()
            .filter(move |(_, k)| **k == kind)
            .map(|(s, _)| s)
    }

    pub fn supersorts(&self, s: &SortName) -> impl Iterator<Item = &SortName> {
        self.above.get(s).into_iter().flatten()
    }

    /// Applies a sort renaming; edges that become reflexive are dropped.
    pub fn map_sorts(&self, f: impl Fn(&SortName) -> SortName) -> Result<SortGraph> {
        let sorts = self.sorts.iter().map(&f).collect();
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| (f(a), f(b)))
            .filter(|(a, b)| a != b)
            .collect();
        SortGraph::from_parts(sorts, edges)
    }
}

fn find_cycle(
    sorts: &BTreeSet<SortName>,
    successors: &BTreeMap<&SortName, Vec<&SortName>>,
) -> Option<Vec<SortName>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: BTreeMap<&SortName, Mark> = BTreeMap::new();

    for root in sorts {
        if marks.contains_key(root) {
            continue;
        }
        // explicit DFS stack of (node, next successor index)
        let mut path: Vec<&SortName> = vec![root];
        let mut cursor: Vec<usize> = vec![0];
        marks.insert(root, Mark::Active);
        while let Some(&node) = path.last() {
            let idx = cursor.last_mut().unwrap();
            let next = successors.get(node).and_then(|v| v.get(*idx)).copied();
            *idx += 1;
            match next {
                Some(succ) => match marks.get(succ) {
                    Some(Mark::Active) => {
                        let start = path.iter().position(|s| *s == succ).unwrap();
                        let mut cycle: Vec<SortName> =
                            path[start..].iter().map(|s| (*s).clone()).collect();
                        cycle.push(succ.clone());
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(succ, Mark::Active);
                        path.push(succ);
                        cursor.push(0);
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    path.pop();
                    cursor.pop();
                }
            }
        }
    }
    None
}

fn components(
    sorts: &BTreeSet<SortName>,
    edges: &BTreeSet<(SortName, SortName)>,
) -> BTreeMap<SortName, KindId> {
    let index: BTreeMap<&SortName, usize> = sorts.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut parent: Vec<usize> = (0..sorts.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, index[a]), find(&mut parent, index[b]));
        // sorts are enumerated in name order, so the smaller root index is
        // the lexicographically smaller sort
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
    let names: Vec<&SortName> = sorts.iter().collect();
    sorts
        .iter()
        .map(|s| {
            let root = find(&mut parent, index[s]);
            (s.clone(), KindId(names[root].clone()))
        })
        .collect()
}
