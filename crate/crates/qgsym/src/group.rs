//! Finite permutations, finite groups given by generators or tables, and
//! Cayley color digraphs.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::SearchCaps;

/// A permutation of the points `0..n`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self.cycle_notation())
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from its image array, verifying bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation of `0..degree` from disjoint cycles; points not
    /// mentioned are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut moved = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree {
                    return Err(Error::Parse(format!(
                        "point {p} out of range for degree {degree}"
                    )));
                }
                if moved[p] {
                    return Err(Error::Parse(format!("point {p} appears twice in cycles")));
                }
                moved[p] = true;
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    /// Parses disjoint-cycle notation such as `(0 1)(2 3)`; `()` is the
    /// identity. Points may be separated by spaces or commas.
    pub fn parse_cycles(degree: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in cycle notation: {s}")))?;
            if !rest[..open].trim().is_empty() {
                return Err(Error::Parse(format!("stray text in cycle notation: {s}")));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced '(' in cycle notation: {s}")))?;
            let body = &rest[open + 1..close];
            let points: Vec<usize> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point '{t}' in cycle notation")))
                })
                .collect::<Result<_>>()?;
            if !points.is_empty() {
                cycles.push(points);
            }
            rest = rest[close + 1..].trim_start();
        }
        Self::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Composition `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Self {
            images: (0..self.degree())
                .map(|i| self.images[other.images[i]])
                .collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Self { images }
    }

    /// Multiplicative order (lcm of cycle lengths).
    pub fn order(&self) -> usize {
        let mut seen = vec![false; self.degree()];
        let mut ord = 1usize;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p];
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    /// Disjoint-cycle string, fixed points suppressed; identity prints `()`.
    pub fn cycle_notation(&self) -> String {
        let mut seen = vec![false; self.degree()];
        let mut out = String::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&p.to_string());
                first = false;
                p = self.images[p];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Compose two permutations (apply `q` first, then `p`).
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    p.compose(q)
}

/// A finite group as a multiplication table over canonically indexed
/// elements, with `table[a][b] = a·b`.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    generators: Vec<usize>,
    element_perms: Option<Vec<Permutation>>,
}

impl FiniteGroup {
    /// The trivial group, carried by the identity permutation on `degree`
    /// points.
    pub fn trivial(degree: usize) -> Self {
        Self {
            order: 1,
            table: vec![vec![0]],
            identity: 0,
            generators: Vec::new(),
            element_perms: Some(vec![Permutation::identity(degree)]),
        }
    }

    /// Closure of a non-empty generator list under composition. Elements are
    /// indexed in BFS discovery order from the identity, which makes tables
    /// and downstream Cayley digraphs deterministic.
    pub fn from_generators(gens: &[Permutation], order_cap: usize) -> Result<Self> {
        let degree = match gens.first() {
            Some(g) => g.degree(),
            None => {
                return Err(Error::Parse(
                    "empty generator list; use FiniteGroup::trivial for the trivial group".into(),
                ))
            }
        };
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }

        let mut elements: Vec<Permutation> = vec![Permutation::identity(degree)];
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(0);
        while let Some(u) = queue.pop_front() {
            for g in gens {
                let next = elements[u].compose(g)?;
                if !index.contains_key(&next) {
                    if elements.len() + 1 > order_cap {
                        return Err(Error::CapExceeded {
                            what: "group order",
                            limit: order_cap,
                            actual: elements.len() + 1,
                        });
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                    queue.push_back(elements.len() - 1);
                }
            }
        }

        let order = elements.len();
        let mut table = vec![vec![0usize; order]; order];
        for a in 0..order {
            for b in 0..order {
                let prod = elements[a].compose(&elements[b])?;
                table[a][b] = index[&prod];
            }
        }
        let generators = gens
            .iter()
            .filter(|g| !g.is_identity())
            .map(|g| index[g])
            .collect::<Vec<_>>();
        let mut generators_dedup = Vec::new();
        for g in generators {
            if !generators_dedup.contains(&g) {
                generators_dedup.push(g);
            }
        }
        Ok(Self {
            order,
            table,
            identity: 0,
            generators: generators_dedup,
            element_perms: Some(elements),
        })
    }

    /// Wraps an explicit multiplication table, validating the group axioms.
    /// A generator list is located greedily when not supplied.
    pub fn from_table(table: Vec<Vec<usize>>, generators: Option<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        for row in &table {
            if row.len() != order {
                return Err(Error::InvalidTable("table is not square".into()));
            }
            if row.iter().any(|&x| x >= order) {
                return Err(Error::InvalidTable("entry out of range".into()));
            }
        }
        // Latin square.
        for i in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for j in 0..order {
                if seen_row[table[i][j]] || seen_col[table[j][i]] {
                    return Err(Error::InvalidTable(format!(
                        "row/column {i} is not a bijection"
                    )));
                }
                seen_row[table[i][j]] = true;
                seen_col[table[j][i]] = true;
            }
        }
        // Two-sided identity.
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        // Associativity, exhaustively. Desk-scale tables only.
        if order > 512 {
            return Err(Error::CapExceeded {
                what: "table order (associativity check)",
                limit: 512,
                actual: order,
            });
        }
        for a in 0..order {
            for b in 0..order {
                let ab = table[a][b];
                for c in 0..order {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidTable(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let generators = match generators {
            Some(gens) => {
                if gens.iter().any(|&g| g >= order) {
                    return Err(Error::InvalidTable("generator index out of range".into()));
                }
                if !Self::generates(&table, identity, &gens) {
                    return Err(Error::InvalidTable(
                        "given generators do not generate the group".into(),
                    ));
                }
                gens
            }
            None => Self::greedy_generators(&table, identity),
        };
        Ok(Self {
            order,
            table,
            identity,
            generators,
            element_perms: None,
        })
    }

    /// Wraps a set of permutations that is already closed under composition
    /// (e.g. a full automorphism list), preserving the given element order.
    pub fn from_permutation_set(perms: Vec<Permutation>) -> Result<Self> {
        let order = perms.len();
        if order == 0 {
            return Err(Error::InvalidTable("empty permutation set".into()));
        }
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        for (i, p) in perms.iter().enumerate() {
            if p.degree() != perms[0].degree() {
                return Err(Error::DegreeMismatch(perms[0].degree(), p.degree()));
            }
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidTable("duplicate permutation".into()));
            }
        }
        let mut table = vec![vec![0usize; order]; order];
        for a in 0..order {
            for b in 0..order {
                let prod = perms[a].compose(&perms[b])?;
                table[a][b] = *index
                    .get(&prod)
                    .ok_or_else(|| Error::InvalidTable("set not closed under composition".into()))?;
            }
        }
        let identity = perms
            .iter()
            .position(|p| p.is_identity())
            .ok_or_else(|| Error::InvalidTable("identity missing".into()))?;
        let generators = Self::greedy_generators(&table, identity);
        Ok(Self {
            order,
            table,
            identity,
            generators,
            element_perms: Some(perms),
        })
    }

    fn generates(table: &[Vec<usize>], identity: usize, gens: &[usize]) -> bool {
        let order = table.len();
        let mut reached = vec![false; order];
        reached[identity] = true;
        let mut queue = VecDeque::from([identity]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &g in gens {
                let v = table[u][g];
                if !reached[v] {
                    reached[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == order
    }

    fn greedy_generators(table: &[Vec<usize>], identity: usize) -> Vec<usize> {
        let order = table.len();
        let mut gens: Vec<usize> = Vec::new();
        loop {
            let mut reached = vec![false; order];
            reached[identity] = true;
            let mut queue = VecDeque::from([identity]);
            while let Some(u) = queue.pop_front() {
                for &g in &gens {
                    let v = table[u][g];
                    if !reached[v] {
                        reached[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            match (0..order).find(|&x| !reached[x]) {
                Some(x) => gens.push(x),
                None => return gens,
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn element_perms(&self) -> Option<&[Permutation]> {
        self.element_perms.as_deref()
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse_of(&self, a: usize) -> usize {
        (0..self.order)
            .find(|&b| self.table[a][b] == self.identity)
            .expect("group table has inverses")
    }

    /// Multiplicative order of element `a`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][a];
            k += 1;
        }
        k
    }

    pub fn is_involution(&self, a: usize) -> bool {
        a != self.identity && self.table[a][a] == self.identity
    }

    /// Multiset of element orders, as order -> count.
    pub fn order_spectrum(&self) -> BTreeMap<usize, usize> {
        let mut spec = BTreeMap::new();
        for a in 0..self.order {
            *spec.entry(self.element_order(a)).or_insert(0) += 1;
        }
        spec
    }
}

/// Searches for a table-preserving bijection `g1 -> g2`. Returns the witness
/// map (indexed by `g1` elements) when the groups are isomorphic. The search
/// assigns images only to a generating set, pruned by element order, and
/// extends multiplicatively.
pub fn groups_isomorphic(
    g1: &FiniteGroup,
    g2: &FiniteGroup,
    caps: &SearchCaps,
) -> Result<Option<Vec<usize>>> {
    for g in [g1, g2] {
        if g.order() > caps.group_order {
            return Err(Error::CapExceeded {
                what: "group order",
                limit: caps.group_order,
                actual: g.order(),
            });
        }
    }
    if g1.order() != g2.order() {
        return Ok(None);
    }
    if g1.order_spectrum() != g2.order_spectrum() {
        return Ok(None);
    }
    let n = g1.order();
    let gens = if g1.generators.is_empty() {
        vec![g1.identity]
    } else {
        g1.generators.clone()
    };

    // Express every g1 element as (parent, generator) along a BFS tree.
    let mut word: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut bfs_order = vec![g1.identity];
    let mut reached = vec![false; n];
    reached[g1.identity] = true;
    let mut head = 0;
    while head < bfs_order.len() {
        let u = bfs_order[head];
        head += 1;
        for &g in &gens {
            let v = g1.table[u][g];
            if !reached[v] {
                reached[v] = true;
                word[v] = Some((u, g));
                bfs_order.push(v);
            }
        }
    }

    let orders2: Vec<usize> = (0..n).map(|a| g2.element_order(a)).collect();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for &g in &gens {
        let og = g1.element_order(g);
        candidates.push((0..n).filter(|&b| orders2[b] == og).collect());
    }

    struct Search<'a> {
        g1: &'a FiniteGroup,
        g2: &'a FiniteGroup,
        gens: &'a [usize],
        candidates: Vec<Vec<usize>>,
        bfs_order: Vec<usize>,
        word: Vec<Option<(usize, usize)>>,
    }

    impl Search<'_> {
        fn try_assignment(&self, images: &[usize]) -> Option<Vec<usize>> {
            let n = self.g1.order();
            let mut phi = vec![usize::MAX; n];
            phi[self.g1.identity] = self.g2.identity;
            for (&g, &img) in self.gens.iter().zip(images) {
                if phi[g] != usize::MAX && phi[g] != img {
                    return None;
                }
                phi[g] = img;
            }
            for &e in &self.bfs_order {
                if let Some((parent, gen)) = self.word[e] {
                    let gi = self.gens.iter().position(|&g| g == gen).unwrap();
                    let v = self.g2.table[phi[parent]][images[gi]];
                    if phi[e] != usize::MAX && phi[e] != v {
                        return None;
                    }
                    phi[e] = v;
                }
            }
            // Bijectivity.
            let mut seen = vec![false; n];
            for &v in &phi {
                if v == usize::MAX || seen[v] {
                    return None;
                }
                seen[v] = true;
            }
            // Full homomorphism check.
            for a in 0..n {
                for b in 0..n {
                    if phi[self.g1.table[a][b]] != self.g2.table[phi[a]][phi[b]] {
                        return None;
                    }
                }
            }
            Some(phi)
        }

        fn run(&self, choice: &mut Vec<usize>, depth: usize) -> Option<Vec<usize>> {
            if depth == self.gens.len() {
                return self.try_assignment(choice);
            }
            for i in 0..self.candidates[depth].len() {
                choice[depth] = self.candidates[depth][i];
                if let Some(w) = self.run(choice, depth + 1) {
                    return Some(w);
                }
            }
            None
        }
    }

    let search = Search {
        g1,
        g2,
        gens: &gens,
        candidates,
        bfs_order,
        word,
    };
    let mut choice = vec![0usize; gens.len()];
    Ok(search.run(&mut choice, 0))
}

/// Cayley color digraph: one arc `(u, u·g_i, i)` per node and generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredDigraph {
    pub node_count: usize,
    pub arcs: Vec<(usize, usize, usize)>,
}

/// Builds the Cayley color digraph of the group over its generator list.
pub fn cayley_color_digraph(g: &FiniteGroup) -> Result<ColoredDigraph> {
    if g.generators.contains(&g.identity) {
        return Err(Error::IdentityGenerator);
    }
    if g.generators.is_empty() && g.order() > 1 {
        return Err(Error::InvalidTable(
            "non-trivial group without generators".into(),
        ));
    }
    let mut arcs = Vec::with_capacity(g.order() * g.generators.len());
    for u in 0..g.order() {
        for (color, &gen) in g.generators.iter().enumerate() {
            arcs.push((u, g.table[u][gen], color));
        }
    }
    Ok(ColoredDigraph {
        node_count: g.order(),
        arcs,
    })
}

// Named groups used throughout the tests and the realization corpus.

/// Cyclic group of order `n`, generated by one `n`-cycle.
pub fn cyclic(n: usize) -> FiniteGroup {
    if n == 1 {
        return FiniteGroup::trivial(1);
    }
    let cycle: Vec<usize> = (0..n).collect();
    let gen = Permutation::from_cycles(n, &[cycle]).unwrap();
    FiniteGroup::from_generators(&[gen], SearchCaps::DEFAULT_GROUP_ORDER).unwrap()
}

/// Klein four-group as `<(0 1), (2 3)>`.
pub fn klein_four() -> FiniteGroup {
    let a = Permutation::from_cycles(4, &[vec![0, 1]]).unwrap();
    let b = Permutation::from_cycles(4, &[vec![2, 3]]).unwrap();
    FiniteGroup::from_generators(&[a, b], SearchCaps::DEFAULT_GROUP_ORDER).unwrap()
}

/// Symmetric group S3 as `<(0 1), (0 1 2)>`.
pub fn symmetric_3() -> FiniteGroup {
    let t = Permutation::from_cycles(3, &[vec![0, 1]]).unwrap();
    let c = Permutation::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
    FiniteGroup::from_generators(&[t, c], SearchCaps::DEFAULT_GROUP_ORDER).unwrap()
}

/// Dihedral group of the square, `<(0 1 2 3), (1 3)>`, order 8.
pub fn dihedral_4() -> FiniteGroup {
    let r = Permutation::from_cycles(4, &[vec![0, 1, 2, 3]]).unwrap();
    let s = Permutation::from_cycles(4, &[vec![1, 3]]).unwrap();
    FiniteGroup::from_generators(&[r, s], SearchCaps::DEFAULT_GROUP_ORDER).unwrap()
}

/// Parses the textual group format:
///
/// ```text
/// perm <degree>
/// (0 1)(2 3)
/// (0 1 2)
/// ```
///
/// or
///
/// ```text
/// table
/// 0 1
/// 1 0
/// generators 1
/// ```
///
/// Blank lines and `#` comments are ignored. A `perm` header with no
/// generator lines yields the trivial group on `<degree>` points.
pub fn parse_group_file(text: &str, order_cap: usize) -> Result<FiniteGroup> {
    let mut lines = text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty group file".into()))?;
    let mut header_tokens = header.split_whitespace();
    match header_tokens.next() {
        Some("perm") => {
            let degree: usize = header_tokens
                .next()
                .ok_or_else(|| Error::Parse("perm header needs a degree: `perm <n>`".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad degree in perm header".into()))?;
            if degree == 0 {
                return Err(Error::Parse("degree must be positive".into()));
            }
            let gens: Vec<Permutation> = lines
                .map(|l| Permutation::parse_cycles(degree, l))
                .collect::<Result<_>>()?;
            if gens.is_empty() || gens.iter().all(|g| g.is_identity()) {
                Ok(FiniteGroup::trivial(degree))
            } else {
                FiniteGroup::from_generators(&gens, order_cap)
            }
        }
        Some("table") => {
            let mut rows: Vec<Vec<usize>> = Vec::new();
            let mut generators: Option<Vec<usize>> = None;
            for line in lines {
                if let Some(rest) = line.strip_prefix("generators") {
                    let gens: Vec<usize> = rest
                        .split_whitespace()
                        .map(|t| {
                            t.parse::<usize>()
                                .map_err(|_| Error::Parse(format!("bad generator index '{t}'")))
                        })
                        .collect::<Result<_>>()?;
                    generators = Some(gens);
                    continue;
                }
                let row: Vec<usize> = line
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad table entry '{t}'")))
                    })
                    .collect::<Result<_>>()?;
                rows.push(row);
            }
            if rows.len() > order_cap {
                return Err(Error::CapExceeded {
                    what: "group order",
                    limit: order_cap,
                    actual: rows.len(),
                });
            }
            FiniteGroup::from_table(rows, generators)
        }
        _ => Err(Error::Parse(format!(
            "group file must start with `perm <degree>` or `table`, got `{header}`"
        ))),
    }
}
