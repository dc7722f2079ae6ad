//! Finite groups as dense multiplication tables over element indices.
//!
//! Every group in the crate is a [`FiniteGroup`]: elements are `0..order`,
//! products are table lookups. Permutation input is converted at the boundary
//! by [`FiniteGroup::from_permutations`]. Subgroups, homomorphisms, quotients
//! and conjugacy machinery all work on indices, which keeps quotients and
//! pushouts uniform and every enumeration canonically ordered.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Shared handle to an immutable group.
pub type GroupRef = Arc<FiniteGroup>;

/// Default cap on the size of a permutation-group closure.
pub const DEFAULT_CLOSURE_BOUND: usize = 10080;

const UNSET: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("empty multiplication table")]
    EmptyTable,
    #[error("table row {row} has length {len}, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("table entry [{row}][{col}] = {value} is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(usize, usize, usize),
    #[error("degree must be positive")]
    InvalidDegree,
    #[error("generator {index} is not a permutation of 0..{degree}")]
    NotAPermutation { index: usize, degree: usize },
    #[error("permutation closure exceeded the bound of {0} elements")]
    ClosureBound(usize),
    #[error("element index {0} out of range")]
    ElementOutOfRange(usize),
    #[error("elements do not form a subgroup (witness {0})")]
    NotASubgroup(usize),
    #[error("subgroup is not normal: conjugating {element} by {conjugator} leaves it")]
    NotNormal { conjugator: usize, element: usize },
    #[error("map has length {len}, source has order {expected}")]
    MapLength { len: usize, expected: usize },
    #[error("map is not a homomorphism: f({0}*{1}) != f({0})*f({1})")]
    NotAHomomorphism(usize, usize),
    #[error("generator images are inconsistent with the group relations")]
    InconsistentImages,
    #[error("the given elements do not generate the group")]
    NotGenerating,
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("groups do not match for composition")]
    GroupMismatch,
    #[error("homomorphism is not bijective")]
    NotBijective,
}

pub type Result<T, E = GroupError> = std::result::Result<T, E>;

/// A finite group given by a verified multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    label: Option<String>,
    generators: OnceLock<Vec<usize>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("identity", &self.identity)
            .finish()
    }
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[g][h] = g*h`).
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::EmptyTable);
        }
        let mut flat = Vec::with_capacity(n * n);
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != n {
                return Err(GroupError::NotSquare { row, len: entries.len(), expected: n });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= n {
                    return Err(GroupError::EntryOutOfRange { row, col, value });
                }
                flat.push(value);
            }
        }
        let at = |g: usize, h: usize| flat[g * n + h];
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![UNSET; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or(GroupError::NoInverse(g))?;
        }
        for g in 0..n {
            for h in 0..n {
                let gh = at(g, h);
                for k in 0..n {
                    if at(gh, k) != at(g, at(h, k)) {
                        return Err(GroupError::NotAssociative(g, h, k));
                    }
                }
            }
        }
        Ok(Self::from_parts(n, flat, identity, inverse))
    }

    /// Builds a group from a table already known to be a group table.
    pub(crate) fn from_trusted_table(order: usize, table: Vec<usize>) -> Self {
        debug_assert_eq!(table.len(), order * order);
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| table[e * order + g] == g))
            .expect("trusted table has an identity");
        let mut inverse = vec![UNSET; order];
        for g in 0..order {
            for h in 0..order {
                if table[g * order + h] == identity {
                    inverse[g] = h;
                    break;
                }
            }
        }
        Self::from_parts(order, table, identity, inverse)
    }

    fn from_parts(order: usize, table: Vec<usize>, identity: usize, inverse: Vec<usize>) -> Self {
        FiniteGroup { order, table, identity, inverse, label: None, generators: OnceLock::new() }
    }

    /// Closure of permutation generators under composition.
    ///
    /// Elements are numbered in breadth-first order from the identity, so
    /// element 0 is always the identity. The product `p*q` applies `q` first.
    /// Returns the group together with the permutation of every element.
    pub fn from_permutations(
        degree: usize,
        generators: &[Vec<usize>],
        bound: usize,
    ) -> Result<(Self, Vec<Vec<usize>>)> {
        if degree == 0 {
            return Err(GroupError::InvalidDegree);
        }
        for (index, gen) in generators.iter().enumerate() {
            if !is_permutation(gen, degree) {
                return Err(GroupError::NotAPermutation { index, degree });
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
        let mut cursor = 0;
        while cursor < elements.len() {
            for gen in generators {
                let next = compose_perm(&elements[cursor], gen);
                if !index.contains_key(&next) {
                    if elements.len() == bound {
                        return Err(GroupError::ClosureBound(bound));
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
            cursor += 1;
        }
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for p in &elements {
            for q in &elements {
                table.push(index[&compose_perm(p, q)]);
            }
        }
        Ok((Self::from_trusted_table(n, table), elements))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// `g * x * g^-1`
    #[inline]
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (0..g).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Elements generated by `gens`, as a membership mask.
    fn span_mask(&self, gens: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.order];
        mask[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    queue.push_back(y);
                }
            }
        }
        mask
    }

    /// A small generating set chosen greedily: at each step add the element
    /// whose inclusion enlarges the span most (least index on ties).
    pub fn generators(&self) -> &[usize] {
        self.generators.get_or_init(|| {
            let mut gens = Vec::new();
            let mut span = self.span_mask(&gens);
            let mut size = 1;
            while size < self.order {
                let mut best: Option<(usize, Vec<bool>, usize)> = None;
                for g in 0..self.order {
                    if span[g] {
                        continue;
                    }
                    let mut trial = gens.clone();
                    trial.push(g);
                    let mask = self.span_mask(&trial);
                    let count = mask.iter().filter(|&&b| b).count();
                    if best.as_ref().map_or(true, |(_, _, c)| count > *c) {
                        best = Some((g, mask, count));
                    }
                }
                let (g, mask, count) = best.expect("span is proper");
                gens.push(g);
                span = mask;
                size = count;
            }
            gens
        })
    }

    pub fn check_element(&self, g: usize) -> Result<()> {
        if g < self.order {
            Ok(())
        } else {
            Err(GroupError::ElementOutOfRange(g))
        }
    }

    /// Conjugacy classes, each sorted, ordered by least element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for x in 0..self.order {
            if seen[x] {
                continue;
            }
            let mut class: Vec<usize> = (0..self.order).map(|g| self.conjugate(g, x)).collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                seen[y] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// Class index of every element, matching [`conjugacy_classes`](Self::conjugacy_classes).
    pub fn class_map(&self) -> Vec<usize> {
        let mut map = vec![0; self.order];
        for (i, class) in self.conjugacy_classes().iter().enumerate() {
            for &x in class {
                map[x] = i;
            }
        }
        map
    }

    pub fn are_conjugate(&self, x: usize, y: usize) -> bool {
        (0..self.order).any(|g| self.conjugate(g, x) == y)
    }
}

/// Composition of permutations in the convention `(p*q)(x) = p(q(x))`.
pub fn compose_perm(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&x| p[x]).collect()
}

fn is_permutation(p: &[usize], degree: usize) -> bool {
    if p.len() != degree {
        return false;
    }
    let mut seen = vec![false; degree];
    for &x in p {
        if x >= degree || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// A subgroup of a parent group, stored as a sorted element list.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: GroupRef,
    elements: Vec<usize>,
    mask: Vec<bool>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && same_group(&self.parent, &other.parent)
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// Validates an element set as a subgroup.
    pub fn new(parent: &GroupRef, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; parent.order()];
        for g in elements {
            parent.check_element(g)?;
            mask[g] = true;
        }
        if !mask[parent.identity()] {
            return Err(GroupError::NotASubgroup(parent.identity()));
        }
        let elements: Vec<usize> = (0..parent.order()).filter(|&g| mask[g]).collect();
        for &g in &elements {
            if !mask[parent.inv(g)] {
                return Err(GroupError::NotASubgroup(g));
            }
            for &h in &elements {
                if !mask[parent.mul(g, h)] {
                    return Err(GroupError::NotASubgroup(parent.mul(g, h)));
                }
            }
        }
        Ok(Subgroup { parent: parent.clone(), elements, mask })
    }

    fn from_mask(parent: &GroupRef, mask: Vec<bool>) -> Self {
        let elements = (0..parent.order()).filter(|&g| mask[g]).collect();
        Subgroup { parent: parent.clone(), elements, mask }
    }

    /// Subgroup generated by `gens`.
    pub fn generated(parent: &GroupRef, gens: &[usize]) -> Result<Self> {
        for &g in gens {
            parent.check_element(g)?;
        }
        Ok(Self::from_mask(parent, parent.span_mask(gens)))
    }

    pub fn whole(parent: &GroupRef) -> Self {
        Self::from_mask(parent, vec![true; parent.order()])
    }

    pub fn trivial(parent: &GroupRef) -> Self {
        Self::generated(parent, &[]).expect("empty generating set")
    }

    pub fn parent(&self) -> &GroupRef {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.mask.get(g).copied().unwrap_or(false)
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    pub fn is_normal(&self) -> bool {
        self.normality_witness().is_none()
    }

    /// First `(conjugator, element)` with `conjugator*element*conjugator^-1` outside.
    pub fn normality_witness(&self) -> Option<(usize, usize)> {
        let g = &self.parent;
        for c in g.elements() {
            for &x in &self.elements {
                if !self.contains(g.conjugate(c, x)) {
                    return Some((c, x));
                }
            }
        }
        None
    }

    /// `g H g^-1`
    pub fn conjugate_by(&self, c: usize) -> Subgroup {
        let g = &self.parent;
        let mut mask = vec![false; g.order()];
        for &x in &self.elements {
            mask[g.conjugate(c, x)] = true;
        }
        Self::from_mask(&self.parent, mask)
    }

    /// Join with another subgroup of the same parent.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.elements.clone();
        gens.extend_from_slice(&other.elements);
        Self::from_mask(&self.parent, self.parent.span_mask(&gens))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let mask = (0..self.parent.order()).map(|g| self.contains(g) && other.contains(g)).collect();
        Self::from_mask(&self.parent, mask)
    }

    /// The subgroup as a group in its own right, with the inclusion map.
    ///
    /// Elements are renumbered in increasing parent-index order.
    pub fn to_group(&self) -> (GroupRef, GroupHom) {
        let g = &self.parent;
        let pos: HashMap<usize, usize> = self.elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = self.elements.len();
        let mut table = Vec::with_capacity(n * n);
        for &x in &self.elements {
            for &y in &self.elements {
                table.push(pos[&g.mul(x, y)]);
            }
        }
        let group = Arc::new(FiniteGroup::from_trusted_table(n, table));
        let inclusion = GroupHom {
            source: group.clone(),
            target: g.clone(),
            map: self.elements.clone(),
        };
        (group, inclusion)
    }
}

/// Same group: the same allocation or equal multiplication tables.
pub fn same_group(a: &GroupRef, b: &GroupRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A verified homomorphism between finite groups.
#[derive(Clone)]
pub struct GroupHom {
    source: GroupRef,
    target: GroupRef,
    map: Vec<usize>,
}

impl PartialEq for GroupHom {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
            && same_group(&self.source, &other.source)
            && same_group(&self.target, &other.target)
    }
}

impl Eq for GroupHom {}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom{:?}", self.map)
    }
}

impl GroupHom {
    /// Validates `map` as a homomorphism (all pairs checked).
    pub fn new(source: &GroupRef, target: &GroupRef, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(GroupError::MapLength { len: map.len(), expected: source.order() });
        }
        for &y in &map {
            target.check_element(y)?;
        }
        for g in source.elements() {
            for h in source.elements() {
                if map[source.mul(g, h)] != target.mul(map[g], map[h]) {
                    return Err(GroupError::NotAHomomorphism(g, h));
                }
            }
        }
        Ok(GroupHom { source: source.clone(), target: target.clone(), map })
    }

    pub(crate) fn new_unchecked(source: &GroupRef, target: &GroupRef, map: Vec<usize>) -> Self {
        debug_assert_eq!(map.len(), source.order());
        GroupHom { source: source.clone(), target: target.clone(), map }
    }

    /// Extends images of `source.generators()` to a homomorphism.
    pub fn from_generator_images(source: &GroupRef, target: &GroupRef, images: &[usize]) -> Result<Self> {
        Self::from_images_of(source, target, source.generators(), images)
    }

    /// Extends `gens[k] -> images[k]` to a homomorphism; `gens` must generate
    /// `source`.
    pub fn from_images_of(source: &GroupRef, target: &GroupRef, gens: &[usize], images: &[usize]) -> Result<Self> {
        for &g in gens {
            source.check_element(g)?;
        }
        if source.span_mask(gens).iter().any(|&b| !b) {
            return Err(GroupError::NotGenerating);
        }
        if gens.len() != images.len() {
            return Err(GroupError::ImageCount { expected: gens.len(), got: images.len() });
        }
        for &y in images {
            target.check_element(y)?;
        }
        extend_from_generators(source, target, gens, images)
            .map(|map| GroupHom { source: source.clone(), target: target.clone(), map })
            .ok_or(GroupError::InconsistentImages)
    }

    pub fn identity(group: &GroupRef) -> Self {
        GroupHom { source: group.clone(), target: group.clone(), map: group.elements().collect() }
    }

    pub fn trivial(source: &GroupRef, target: &GroupRef) -> Self {
        GroupHom { source: source.clone(), target: target.clone(), map: vec![target.identity(); source.order()] }
    }

    /// Inner automorphism `x -> c*x*c^-1`.
    pub fn inner(group: &GroupRef, c: usize) -> Self {
        let map = group.elements().map(|x| group.conjugate(c, x)).collect();
        GroupHom { source: group.clone(), target: group.clone(), map }
    }

    pub fn source(&self) -> &GroupRef {
        &self.source
    }

    pub fn target(&self) -> &GroupRef {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if !same_group(inner.target(), &self.source) {
            return Err(GroupError::GroupMismatch);
        }
        let map = inner.map.iter().map(|&x| self.map[x]).collect();
        Ok(GroupHom { source: inner.source.clone(), target: self.target.clone(), map })
    }

    /// Post-composition with conjugation by `c` in the target.
    pub fn conjugated_by(&self, c: usize) -> GroupHom {
        let t = &self.target;
        let map = self.map.iter().map(|&x| t.conjugate(c, x)).collect();
        GroupHom { source: self.source.clone(), target: self.target.clone(), map }
    }

    pub fn kernel(&self) -> Subgroup {
        let e = self.target.identity();
        let mask = self.map.iter().map(|&y| y == e).collect();
        Subgroup::from_mask(&self.source, mask)
    }

    pub fn image(&self) -> Subgroup {
        let mut mask = vec![false; self.target.order()];
        for &y in &self.map {
            mask[y] = true;
        }
        Subgroup::from_mask(&self.target, mask)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }

    pub fn is_endomorphism(&self) -> bool {
        same_group(&self.source, &self.target)
    }

    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_bijective() {
            return Err(GroupError::NotBijective);
        }
        let mut map = vec![0; self.source.order()];
        for (g, &y) in self.map.iter().enumerate() {
            map[y] = g;
        }
        Ok(GroupHom { source: self.target.clone(), target: self.source.clone(), map })
    }

    /// Restriction to a subgroup of the source, as a hom out of `sub.to_group()`.
    pub fn restrict(&self, sub: &Subgroup) -> (GroupRef, GroupHom) {
        let (group, inclusion) = sub.to_group();
        let map = inclusion.map.iter().map(|&x| self.map[x]).collect();
        let hom = GroupHom { source: group.clone(), target: self.target.clone(), map };
        (group, hom)
    }
}

/// Breadth-first extension of generator images along the Cayley graph.
/// Every edge `x -> x*g` is checked, which suffices for the hom property.
fn extend_from_generators(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let mut map = vec![UNSET; source.order()];
    map[source.identity()] = target.identity();
    let mut queue = VecDeque::from([source.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&g, &img) in gens.iter().zip(images) {
            let y = source.mul(x, g);
            let want = target.mul(map[x], img);
            if map[y] == UNSET {
                map[y] = want;
                queue.push_back(y);
            } else if map[y] != want {
                return None;
            }
        }
    }
    Some(map)
}

/// All homomorphisms `src -> tgt`, sorted lexicographically by map.
///
/// Images are enumerated only on the greedy generating set of `src`, with
/// each candidate image restricted to elements whose order divides the
/// generator's order.
pub fn enumerate_homs(src: &GroupRef, tgt: &GroupRef) -> Vec<GroupHom> {
    let gens = src.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let n = src.element_order(g);
            tgt.elements().filter(|&t| n % tgt.element_order(t) == 0).collect()
        })
        .collect();
    let mut out = Vec::new();
    for_each_choice(&candidates, |images| {
        if let Some(map) = extend_from_generators(src, tgt, gens, images) {
            out.push(GroupHom { source: src.clone(), target: tgt.clone(), map });
        }
    });
    out.sort_by(|a, b| a.map.cmp(&b.map));
    out.dedup_by(|a, b| a.map == b.map);
    out
}

/// Odometer over the cartesian product of candidate lists.
pub(crate) fn for_each_choice(candidates: &[Vec<usize>], mut f: impl FnMut(&[usize])) {
    if candidates.iter().any(Vec::is_empty) {
        return;
    }
    let k = candidates.len();
    let mut idx = vec![0; k];
    let mut choice: Vec<usize> = candidates.iter().map(|c| c[0]).collect();
    loop {
        f(&choice);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < candidates[pos].len() {
                choice[pos] = candidates[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            choice[pos] = candidates[pos][0];
        }
    }
}

/// Outcome of the conjugate-covering computation for a subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanReport {
    /// `⋃ g H g^-1`, sorted.
    pub union: Vec<usize>,
    pub group_order: usize,
    pub index: usize,
    /// `|G| - [G:H] + 1`
    pub bound: usize,
    pub covers: bool,
}

impl JordanReport {
    pub fn union_size(&self) -> usize {
        self.union.len()
    }

    pub fn respects_bound(&self) -> bool {
        self.union.len() <= self.bound
    }
}

pub fn union_of_conjugates(sub: &Subgroup) -> JordanReport {
    let g = sub.parent();
    let mut mask = vec![false; g.order()];
    for c in g.elements() {
        for &x in sub.elements() {
            mask[g.conjugate(c, x)] = true;
        }
    }
    let union: Vec<usize> = (0..g.order()).filter(|&x| mask[x]).collect();
    let index = sub.index();
    JordanReport {
        covers: union.len() == g.order(),
        union,
        group_order: g.order(),
        index,
        bound: g.order() - index + 1,
    }
}

/// True iff `phi(g)` is conjugate to `g` for every `g`. Non-endomorphisms
/// are never class preserving.
pub fn is_class_preserving(phi: &GroupHom) -> bool {
    if !phi.is_endomorphism() {
        return false;
    }
    let classes = phi.source().class_map();
    phi.source().elements().all(|g| classes[g] == classes[phi.apply(g)])
}

/// Quotient by a normal subgroup. Cosets are named by their least element
/// and numbered in increasing order of that representative.
pub fn quotient(normal: &Subgroup) -> Result<(GroupRef, GroupHom)> {
    if let Some((conjugator, element)) = normal.normality_witness() {
        return Err(GroupError::NotNormal { conjugator, element });
    }
    let g = normal.parent();
    let mut coset_of = vec![UNSET; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if coset_of[x] != UNSET {
            continue;
        }
        for &n in normal.elements() {
            coset_of[g.mul(x, n)] = reps.len();
        }
        reps.push(x);
    }
    let m = reps.len();
    let mut table = Vec::with_capacity(m * m);
    for &r in &reps {
        for &s in &reps {
            table.push(coset_of[g.mul(r, s)]);
        }
    }
    let q = Arc::new(FiniteGroup::from_trusted_table(m, table));
    let map = GroupHom { source: g.clone(), target: q.clone(), map: coset_of };
    Ok((q, map))
}

/// All subgroups, ordered by size and then by element list.
pub fn all_subgroups(group: &GroupRef) -> Vec<Subgroup> {
    let mut masks: Vec<Vec<bool>> = Vec::new();
    let mut known: std::collections::HashSet<Vec<bool>> = Default::default();
    for g in group.elements() {
        let m = group.span_mask(&[g]);
        if known.insert(m.clone()) {
            masks.push(m);
        }
    }
    // every subgroup is the join of its cyclic subgroups
    let mut frontier = masks.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for b in &masks.clone() {
                let gens: Vec<usize> = (0..group.order()).filter(|&x| a[x] || b[x]).collect();
                let m = group.span_mask(&gens);
                if known.insert(m.clone()) {
                    masks.push(m.clone());
                    next.push(m);
                }
            }
        }
        frontier = next;
    }
    let mut subs: Vec<Subgroup> = masks.into_iter().map(|m| Subgroup::from_mask(group, m)).collect();
    subs.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    subs
}

pub fn normal_subgroups(group: &GroupRef) -> Vec<Subgroup> {
    all_subgroups(group).into_iter().filter(Subgroup::is_normal).collect()
}

/// Subgroups normal in the whole group and contained in `within`.
pub fn normal_subgroups_within(within: &Subgroup) -> Vec<Subgroup> {
    normal_subgroups(within.parent())
        .into_iter()
        .filter(|n| n.is_subset_of(within))
        .collect()
}

/// Direct product with elements `(g, h)` numbered `g * |H| + h`.
pub fn direct_product(g: &GroupRef, h: &GroupRef) -> GroupRef {
    let (n, m) = (g.order(), h.order());
    let size = n * m;
    let mut table = Vec::with_capacity(size * size);
    for x in 0..size {
        for y in 0..size {
            table.push(g.mul(x / m, y / m) * m + h.mul(x % m, y % m));
        }
    }
    Arc::new(FiniteGroup::from_trusted_table(size, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> GroupRef {
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Arc::new(FiniteGroup::from_table(rows).unwrap())
    }

    fn s3() -> (GroupRef, Vec<Vec<usize>>) {
        let (g, perms) = FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], 100).unwrap();
        (Arc::new(g), perms)
    }

    fn find(perms: &[Vec<usize>], p: &[usize]) -> usize {
        perms.iter().position(|q| q == p).unwrap()
    }

    #[test]
    fn table_validation() {
        let t = FiniteGroup::from_table(vec![vec![0]]).unwrap();
        assert_eq!(t.order(), 1);
        let c4 = cyclic(4);
        assert_eq!(c4.identity(), 0);
        assert_eq!(c4.inv(1), 3);
        assert_eq!(
            FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).unwrap_err(),
            GroupError::NoInverse(1)
        );
        assert_eq!(FiniteGroup::from_table(vec![]).unwrap_err(), GroupError::EmptyTable);
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 2], vec![1, 0]]),
            Err(GroupError::EntryOutOfRange { row: 0, col: 1, value: 2 })
        ));
        assert_eq!(
            FiniteGroup::from_table(vec![vec![1, 0], vec![0, 0]]).unwrap_err(),
            GroupError::NoIdentity
        );
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // a loop of order 5 that is not a group
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(t), Err(GroupError::NotAssociative(..))));
    }

    #[test]
    fn permutation_closure() {
        assert_eq!(s3().0.order(), 6);
        let (d4, _) = FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0], vec![2, 1, 0, 3]], 100).unwrap();
        assert_eq!(d4.order(), 8);
        let (t, _) = FiniteGroup::from_permutations(2, &[vec![0, 1]], 100).unwrap();
        assert_eq!(t.order(), 1);
        assert!(matches!(
            FiniteGroup::from_permutations(3, &[vec![0, 0, 1]], 100),
            Err(GroupError::NotAPermutation { index: 0, .. })
        ));
        assert_eq!(
            FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]], 10).unwrap_err(),
            GroupError::ClosureBound(10)
        );
        assert_eq!(FiniteGroup::from_permutations(0, &[], 10).unwrap_err(), GroupError::InvalidDegree);
    }

    #[test]
    fn hom_enumeration_examples() {
        let c2 = cyclic(2);
        let c4 = cyclic(4);
        let homs = enumerate_homs(&c2, &c4);
        assert_eq!(homs.iter().map(|h| h.map().to_vec()).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 2]]);
        let trivial = cyclic(1);
        assert_eq!(enumerate_homs(&s3().0, &trivial).len(), 1);
        assert_eq!(enumerate_homs(&c2, &s3().0).len(), 4);
    }

    #[test]
    fn jordan_examples() {
        let (g, perms) = s3();
        let a3 = Subgroup::generated(&g, &[find(&perms, &[1, 2, 0])]).unwrap();
        let r = union_of_conjugates(&a3);
        assert_eq!((r.union_size(), r.covers, r.bound), (3, false, 5));
        let t = Subgroup::generated(&g, &[find(&perms, &[1, 0, 2])]).unwrap();
        let r = union_of_conjugates(&t);
        assert_eq!((r.union_size(), r.covers, r.bound), (4, false, 4));
        let r = union_of_conjugates(&Subgroup::whole(&g));
        assert!(r.covers);
        assert_eq!(r.union_size(), 6);
    }

    #[test]
    fn class_preserving_examples() {
        let (g, _) = s3();
        assert!(is_class_preserving(&GroupHom::identity(&g)));
        for c in g.elements() {
            assert!(is_class_preserving(&GroupHom::inner(&g, c)));
        }
        let c4 = cyclic(4);
        let double = GroupHom::new(&c4, &c4, vec![0, 2, 0, 2]).unwrap();
        assert!(!is_class_preserving(&double));
    }

    #[test]
    fn quotient_examples() {
        let c4 = cyclic(4);
        let n = Subgroup::new(&c4, [0, 2]).unwrap();
        let (q, map) = quotient(&n).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(map.apply(1), 1);
        assert_eq!(map.kernel(), n);

        let (g, perms) = s3();
        let (q, map) = quotient(&Subgroup::trivial(&g)).unwrap();
        assert_eq!(q.order(), 6);
        assert_eq!(map.map(), (0..6).collect::<Vec<_>>().as_slice());

        let a3 = Subgroup::generated(&g, &[find(&perms, &[1, 2, 0])]).unwrap();
        let (q, sign) = quotient(&a3).unwrap();
        assert_eq!(q.order(), 2);
        for t in [[1, 0, 2], [0, 2, 1], [2, 1, 0]] {
            assert_ne!(sign.apply(find(&perms, &t)), q.identity());
        }
        assert!(sign.is_surjective());

        let t = Subgroup::generated(&g, &[find(&perms, &[1, 0, 2])]).unwrap();
        assert!(matches!(quotient(&t), Err(GroupError::NotNormal { .. })));
    }

    #[test]
    fn conjugacy_classes_and_subgroups() {
        let (g, _) = s3();
        let mut sizes: Vec<usize> = g.conjugacy_classes().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(cyclic(6).conjugacy_classes().len(), 6);
        assert_eq!(cyclic(1).conjugacy_classes().len(), 1);
        assert_eq!(all_subgroups(&g).len(), 6);
        assert_eq!(normal_subgroups(&g).len(), 3);
        assert_eq!(all_subgroups(&cyclic(12)).len(), 6);
    }

    #[test]
    fn hom_validation_and_generators() {
        let c4 = cyclic(4);
        let c2 = cyclic(2);
        assert_eq!(c4.generators(), &[1]);
        assert!(matches!(GroupHom::new(&c4, &c2, vec![0, 1, 1, 1]), Err(GroupError::NotAHomomorphism(..))));
        let h = GroupHom::from_generator_images(&c4, &c2, &[1]).unwrap();
        assert_eq!(h.map(), &[0, 1, 0, 1]);
        assert_eq!(
            GroupHom::from_generator_images(&c2, &c4, &[1]).unwrap_err(),
            GroupError::InconsistentImages
        );
    }

    #[test]
    fn subgroup_rejects_non_closed_sets() {
        let c4 = cyclic(4);
        assert!(matches!(Subgroup::new(&c4, [0, 1]), Err(GroupError::NotASubgroup(_))));
        assert!(matches!(Subgroup::new(&c4, [2]), Err(GroupError::NotASubgroup(0))));
    }
}
