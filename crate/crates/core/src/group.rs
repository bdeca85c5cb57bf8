//! Finite spaces, transitive permutation groups, stabilizers and transversals.
//!
//! Group elements are addressed by [`ElementId`], their position in the
//! breadth-first enumeration. The identity is always element `0`.
//! Composition is left action: `mul(a, b)` is the permutation `x -> a(b(x))`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub type ElementId = usize;

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// Multiplication tables are materialized only for groups up to this order.
const TABLE_LIMIT: usize = 2048;

/// A permutation of `{0, .., n-1}`; `image[i]` is the image of point `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    image: Vec<usize>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.image)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self { image: (0..n).collect() }
    }

    pub fn from_images(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Self { image })
    }

    /// Build from disjoint cycles of 0-based points, e.g. `[[0, 2, 1]]`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= n || touched[p] {
                    return Err(Error::InvalidPermutation(format!("cycle {cycle:?} repeats or exceeds {n} points")));
                }
                touched[p] = true;
                image[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_images(image)
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm { image: other.image.iter().map(|&x| self.image[x]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Perm { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Disjoint cycle decomposition, fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for start in 0..self.image.len() {
            if seen[start] || self.image[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.image[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.image[x];
            }
            out.push(cycle);
        }
        out
    }
}

/// The underlying set: an ordered list of unique point labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    labels: Vec<String>,
}

impl FiniteSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one point".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSpace(format!("duplicate point label {l:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// Points labelled `"1"`, `"2"`, ...
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A transitive permutation group, fully enumerated.
#[derive(Clone)]
pub struct Group {
    degree: usize,
    generators: Vec<(String, ElementId)>,
    elements: Vec<Perm>,
    lookup: HashMap<Vec<usize>, ElementId>,
    inverse: Vec<ElementId>,
    table: Option<Vec<ElementId>>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("degree", &self.degree)
            .field("order", &self.elements.len())
            .field("generators", &self.generators)
            .finish()
    }
}

impl Group {
    /// Close the generators under composition (breadth first, left
    /// multiplication by generators in the order given).
    pub fn enumerate(degree: usize, generators: Vec<(String, Perm)>, cap: usize) -> Result<Self> {
        for (name, p) in &generators {
            if p.degree() != degree {
                return Err(Error::InvalidPermutation(format!(
                    "generator {name} acts on {} points, expected {degree}",
                    p.degree()
                )));
            }
        }
        let identity = Perm::identity(degree);
        let mut elements = vec![identity.clone()];
        let mut lookup = HashMap::new();
        lookup.insert(identity.image.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for (_, g) in &generators {
                let p = g.compose(&elements[h]);
                if lookup.contains_key(&p.image) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                lookup.insert(p.image.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(p);
            }
        }

        // Transitivity: the orbit of point 0 must be everything.
        let mut reached = vec![false; degree];
        for p in &elements {
            reached[p.apply(0)] = true;
        }
        if reached.iter().any(|r| !r) {
            return Err(Error::NotTransitive);
        }

        let inverse = elements.iter().map(|p| lookup[&p.inverse().image]).collect();
        let gens = generators.into_iter().map(|(name, p)| (name, lookup[&p.image])).collect();
        let mut group = Self { degree, generators: gens, elements, lookup, inverse, table: None };
        if group.order() <= TABLE_LIMIT {
            let n = group.order();
            let mut table = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    table.push(group.lookup[&group.elements[a].compose(&group.elements[b]).image]);
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn identity(&self) -> ElementId {
        0
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        0..self.elements.len()
    }

    pub fn perm(&self, g: ElementId) -> &Perm {
        &self.elements[g]
    }

    pub fn generators(&self) -> &[(String, ElementId)] {
        &self.generators
    }

    pub fn generator_ids(&self) -> Vec<ElementId> {
        self.generators.iter().map(|(_, g)| *g).collect()
    }

    pub fn find(&self, p: &Perm) -> Option<ElementId> {
        self.lookup.get(&p.image).copied()
    }

    pub fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        match &self.table {
            Some(t) => t[a * self.order() + b],
            None => self.lookup[&self.elements[a].compose(&self.elements[b]).image],
        }
    }

    pub fn inv(&self, g: ElementId) -> ElementId {
        self.inverse[g]
    }

    /// `g · x`.
    pub fn act(&self, g: ElementId, x: usize) -> usize {
        self.elements[g].apply(x)
    }

    /// `g⁻¹ · x`.
    pub fn act_inv(&self, g: ElementId, x: usize) -> usize {
        self.elements[self.inverse[g]].apply(x)
    }

    pub fn element_order(&self, g: ElementId) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != 0 {
            x = self.mul(g, x);
            k += 1;
        }
        k
    }

    /// Evaluate a word such as `"s*t"`, `"s^-1 t"`, `"t s^2"` or `"e"`.
    /// Factors are composed left to right as `a ∘ b`.
    pub fn eval_word(&self, word: &str) -> Result<ElementId> {
        let mut acc = self.identity();
        for token in word.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (name, power) = match token.split_once('^') {
                Some((n, p)) => {
                    let p: i64 = p.parse().map_err(|_| Error::InvalidWord(word.to_string()))?;
                    (n, p)
                }
                None => (token, 1),
            };
            let base = match name {
                "e" | "1" | "id" => self.identity(),
                _ => self
                    .generators
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, g)| *g)
                    .ok_or_else(|| Error::InvalidWord(word.to_string()))?,
            };
            let step = if power < 0 { self.inv(base) } else { base };
            for _ in 0..power.unsigned_abs() {
                acc = self.mul(acc, step);
            }
        }
        Ok(acc)
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        Subgroup::new(self, self.elements().filter(|&g| self.act(g, x) == x).collect())
    }

    /// For each point `y`, the first enumerated element sending `x` to `y`.
    pub fn transversal(&self, x: usize) -> Transversal {
        let mut sigma = vec![None; self.degree];
        for g in self.elements() {
            let y = self.act(g, x);
            if sigma[y].is_none() {
                sigma[y] = Some(g);
            }
        }
        Transversal { base: x, sigma: sigma.into_iter().map(|s| s.expect("transitive action")).collect() }
    }

    /// Sign of the underlying permutation.
    pub fn parity(&self, g: ElementId) -> i64 {
        let odd = self.elements[g].cycles().iter().filter(|c| c.len() % 2 == 0).count() % 2;
        if odd == 0 { 1 } else { -1 }
    }
}

/// A subgroup, stored as a sorted list of parent element ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    elements: Vec<ElementId>,
    position: HashMap<ElementId, usize>,
}

impl Subgroup {
    pub fn new(_group: &Group, mut elements: Vec<ElementId>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let position = elements.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        Self { elements, position }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn contains(&self, g: ElementId) -> bool {
        self.position.contains_key(&g)
    }

    /// Index of `g` within this subgroup's element list.
    pub fn position(&self, g: ElementId) -> Option<usize> {
        self.position.get(&g).copied()
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, group: &Group, g: ElementId) -> Subgroup {
        let gi = group.inv(g);
        Subgroup::new(group, self.elements.iter().map(|&h| group.mul(group.mul(g, h), gi)).collect())
    }
}

/// Coset representatives: `sigma[y] · base = y`, with `sigma[base] = e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    base: usize,
    sigma: Vec<ElementId>,
}

impl Transversal {
    /// Validate an explicit choice of representatives.
    pub fn from_elements(group: &Group, base: usize, sigma: Vec<ElementId>) -> Result<Self> {
        if sigma.len() != group.degree() {
            return Err(Error::InvalidTransversal("wrong length".into()));
        }
        for (y, &g) in sigma.iter().enumerate() {
            if g >= group.order() || group.act(g, base) != y {
                return Err(Error::InvalidTransversal(format!("sigma({y}) does not send the base point to {y}")));
            }
        }
        Ok(Self { base, sigma })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn get(&self, y: usize) -> ElementId {
        self.sigma[y]
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.sigma
    }
}

/// Numerical tolerances; ignored by exact fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Absolute/relative comparison threshold.
    pub eps: f64,
    /// Relative pivot threshold for rank decisions.
    pub rank: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps: 1e-9, rank: 1e-8 }
    }
}

/// Default bound on `|G|` for exhaustive all-pairs cocycle validation.
pub const DEFAULT_COCYCLE_CAP: usize = 512;

/// The homogeneous space `S = G/H` every equation lives on: the points, the
/// enumerated group, base point `0`, its stabilizer and a fixed transversal.
#[derive(Clone, Debug)]
pub struct HomogeneousSpace {
    space: FiniteSpace,
    group: Group,
    stabilizer: Subgroup,
    transversal: Transversal,
    tolerance: Tolerance,
    cocycle_cap: usize,
}

impl HomogeneousSpace {
    pub fn new(space: FiniteSpace, generators: Vec<(String, Perm)>) -> Result<Self> {
        Self::with_cap(space, generators, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(space: FiniteSpace, generators: Vec<(String, Perm)>, cap: usize) -> Result<Self> {
        let group = Group::enumerate(space.len(), generators, cap)?;
        let stabilizer = group.stabilizer(0);
        let transversal = group.transversal(0);
        Ok(Self {
            space,
            group,
            stabilizer,
            transversal,
            tolerance: Tolerance::default(),
            cocycle_cap: DEFAULT_COCYCLE_CAP,
        })
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_cocycle_cap(mut self, cap: usize) -> Self {
        self.cocycle_cap = cap;
        self
    }

    /// Generators given as cycles over point labels, e.g. `"(x1 x3 x2)"`.
    pub fn from_cycle_notation(labels: Vec<String>, generators: &[(String, String)]) -> Result<Self> {
        let space = FiniteSpace::new(labels)?;
        let gens = generators
            .iter()
            .map(|(name, text)| Ok((name.clone(), parse_cycles(&space, text)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, gens)
    }

    /// The cycle graph `C_n` with its dihedral symmetry group: `s` is the left
    /// translation `x_i -> x_{i-1}` and `t` the reflection fixing `x_1`.
    pub fn dihedral(n: usize) -> Result<Self> {
        let s = Perm::from_images((0..n).map(|i| (i + n - 1) % n).collect())?;
        let t = Perm::from_images((0..n).map(|i| (n - i) % n).collect())?;
        Self::new(cycle_labels(n)?, vec![("s".into(), s), ("t".into(), t)])
    }

    /// `C_n` with rotations only.
    pub fn cyclic(n: usize) -> Result<Self> {
        let s = Perm::from_images((0..n).map(|i| (i + n - 1) % n).collect())?;
        Self::new(cycle_labels(n)?, vec![("s".into(), s)])
    }

    /// The full symmetric group on `n` points; the stabilizer is `S_{n-1}`.
    pub fn symmetric(n: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if n > 1 {
            gens.push(("a".into(), Perm::from_cycles(n, &[vec![0, 1]])?));
            gens.push(("c".into(), Perm::from_cycles(n, &[(0..n).collect()])?));
        }
        Self::new(FiniteSpace::numbered(n)?, gens)
    }

    /// `A_4` on four points; the stabilizer is cyclic of order 3.
    pub fn alternating4() -> Result<Self> {
        let a = Perm::from_cycles(4, &[vec![0, 1, 2]])?;
        let b = Perm::from_cycles(4, &[vec![1, 2, 3]])?;
        Self::new(FiniteSpace::numbered(4)?, vec![("a".into(), a), ("b".into(), b)])
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.space.len()
    }

    pub fn base_point(&self) -> usize {
        0
    }

    pub fn stabilizer(&self) -> &Subgroup {
        &self.stabilizer
    }

    pub fn transversal(&self) -> &Transversal {
        &self.transversal
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn cocycle_cap(&self) -> usize {
        self.cocycle_cap
    }

    /// A second transversal differing from the default one wherever the
    /// stabilizer is nontrivial: `sigma'(y) = sigma(y) h` for a fixed
    /// `h != e` in `H` (for `y != base`).
    pub fn alternate_transversal(&self) -> Transversal {
        let h = self.stabilizer.elements().iter().copied().find(|&h| h != 0).unwrap_or(0);
        let sigma = (0..self.size())
            .map(|y| if y == 0 { 0 } else { self.group.mul(self.transversal.get(y), h) })
            .collect();
        Transversal::from_elements(&self.group, 0, sigma).expect("right translates by H stay in the coset")
    }
}

fn cycle_labels(n: usize) -> Result<FiniteSpace> {
    FiniteSpace::new((1..=n).map(|i| format!("x{i}")).collect())
}

/// Parse `"(a b c)(d e)"` over the labels of `space`; `"()"` or `""` is the
/// identity.
pub fn parse_cycles(space: &FiniteSpace, text: &str) -> Result<Perm> {
    let bad = || Error::InvalidPermutation(format!("cannot parse cycle notation {text:?}"));
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner_start = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = inner_start.find(')').ok_or_else(bad)?;
        let inner = &inner_start[..close];
        let points = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                space.index_of(t).ok_or_else(|| Error::InvalidPermutation(format!("unknown point {t:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !points.is_empty() {
            cycles.push(points);
        }
        rest = inner_start[close + 1..].trim_start();
    }
    Perm::from_cycles(space.len(), &cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_three_has_six_elements() {
        let hs = HomogeneousSpace::dihedral(3).unwrap();
        assert_eq!(hs.group().order(), 6);
        // s = (x1 x3 x2)
        let s = hs.group().eval_word("s").unwrap();
        assert_eq!(hs.group().perm(s).cycles(), vec![vec![0, 2, 1]]);
        let t = hs.group().eval_word("t").unwrap();
        assert_eq!(hs.group().perm(t).cycles(), vec![vec![1, 2]]);
        // t s t = s^{n-1}
        assert_eq!(hs.group().eval_word("t s t").unwrap(), hs.group().eval_word("s^2").unwrap());
    }

    #[test]
    fn cyclic_subgroup_and_trivial_space() {
        let c3 = HomogeneousSpace::cyclic(3).unwrap();
        assert_eq!(c3.group().order(), 3);
        assert_eq!(c3.stabilizer().elements(), &[0]);

        let one = HomogeneousSpace::new(FiniteSpace::numbered(1).unwrap(), vec![("e".into(), Perm::identity(1))])
            .unwrap();
        assert_eq!(one.group().order(), 1);
        assert_eq!(one.stabilizer().order(), 1);
        assert_eq!(one.transversal().as_slice(), &[0]);
    }

    #[test]
    fn stabilizer_of_base_point_is_reflection() {
        let hs = HomogeneousSpace::dihedral(3).unwrap();
        let t = hs.group().eval_word("t").unwrap();
        assert_eq!(hs.stabilizer().elements(), &[0, t]);
    }

    #[test]
    fn non_transitive_generators_rejected() {
        let space = FiniteSpace::numbered(4).unwrap();
        let g = Perm::from_cycles(4, &[vec![0, 1]]).unwrap();
        let err = HomogeneousSpace::new(space, vec![("g".into(), g)]).unwrap_err();
        assert!(matches!(err, Error::NotTransitive));
    }

    #[test]
    fn group_cap_enforced() {
        let err = Group::enumerate(
            5,
            vec![
                ("a".into(), Perm::from_cycles(5, &[vec![0, 1]]).unwrap()),
                ("c".into(), Perm::from_cycles(5, &[vec![0, 1, 2, 3, 4]]).unwrap()),
            ],
            100,
        )
        .unwrap_err();
        assert!(matches!(err, Error::GroupTooLarge { cap: 100 }));
    }

    #[test]
    fn transversal_is_deterministic_and_based() {
        let hs = HomogeneousSpace::dihedral(5).unwrap();
        let a = hs.group().transversal(0);
        let b = hs.group().transversal(0);
        assert_eq!(a, b);
        assert_eq!(a.get(0), 0);
        for y in 0..5 {
            assert_eq!(hs.group().act(a.get(y), 0), y);
        }
        let alt = hs.alternate_transversal();
        assert_ne!(alt, a);
    }

    #[test]
    fn cycle_notation_over_labels() {
        let hs = HomogeneousSpace::from_cycle_notation(
            vec!["x1".into(), "x2".into(), "x3".into()],
            &[("s".into(), "(x1 x3 x2)".into()), ("t".into(), "(x2 x3)".into())],
        )
        .unwrap();
        assert_eq!(hs.group().order(), 6);
        assert!(parse_cycles(hs.space(), "(x1 x9)").is_err());
        assert!(parse_cycles(hs.space(), "()").unwrap().is_identity());
    }

    #[test]
    fn symmetric_and_alternating_fixtures() {
        let s4 = HomogeneousSpace::symmetric(4).unwrap();
        assert_eq!(s4.group().order(), 24);
        assert_eq!(s4.stabilizer().order(), 6);
        let a4 = HomogeneousSpace::alternating4().unwrap();
        assert_eq!(a4.group().order(), 12);
        assert_eq!(a4.stabilizer().order(), 3);
    }
}
