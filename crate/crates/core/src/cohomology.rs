//! Nonabelian first cohomology of a finite group with coefficients in a
//! finite Γ-group.
//!
//! Conventions: a cocycle satisfies `a(στ) = a(σ) · σ(a(τ))`, and `b` is
//! cohomologous to `a` when `b(σ) = c^-1 · a(σ) · σ(c)` for some `c ∈ M`.
//! The representative of a class is its lexicographically least cocycle.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::extension::{partition_by_conjugation, Extension};
use crate::group::{self, same_group, GroupError, GroupHom, GroupRef, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("not an action by automorphisms: {0}")]
    NotAnAction(String),
    #[error("expected {expected} cocycle values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("cocycle identity fails at ({0}, {1})")]
    NotACocycle(usize, usize),
    #[error("cocycle coefficients do not carry the conjugation action of this lift")]
    NotACocycleForThisAction,
    #[error("pulled-back action differs from the expected coefficients")]
    ActionMismatch,
    #[error("subgroup is not normalized by the image of {0}")]
    NotNormalized(usize),
    #[error("class is not trivial on the kernel (witness {0})")]
    NotTrivialOnKernel(usize),
    #[error("kernel element {0} acts nontrivially on the coefficients")]
    KernelActsNontrivially(usize),
    #[error("quotient map is not surjective")]
    NotSurjective,
    #[error("groups do not match")]
    GroupMismatch,
    #[error(transparent)]
    Group(#[from] GroupError),
}

pub type Result<T, E = CohomologyError> = std::result::Result<T, E>;

/// Shared handle to a coefficient system.
pub type CoeffRef = Arc<GammaGroup>;

/// A finite group `M` with an action of `Γ` by automorphisms.
#[derive(Clone, Debug)]
pub struct GammaGroup {
    gamma: GroupRef,
    m: GroupRef,
    /// `action[σ * |M| + x] = σ(x)`
    action: Vec<usize>,
}

impl PartialEq for GammaGroup {
    fn eq(&self, other: &Self) -> bool {
        self.action == other.action && same_group(&self.gamma, &other.gamma) && same_group(&self.m, &other.m)
    }
}

impl Eq for GammaGroup {}

impl GammaGroup {
    /// `action[σ][x] = σ(x)`; validated as a homomorphism `Γ -> Aut(M)`.
    pub fn new(gamma: &GroupRef, m: &GroupRef, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != gamma.order() || action.iter().any(|row| row.len() != m.order()) {
            return Err(CohomologyError::NotAnAction("shape".into()));
        }
        let flat: Vec<usize> = action.into_iter().flatten().collect();
        let coeff = GammaGroup { gamma: gamma.clone(), m: m.clone(), action: flat };
        coeff.validate()?;
        Ok(coeff)
    }

    fn validate(&self) -> Result<()> {
        let (gamma, m) = (&self.gamma, &self.m);
        for s in gamma.elements() {
            let row = &self.action[s * m.order()..(s + 1) * m.order()];
            if row.iter().any(|&y| y >= m.order()) {
                return Err(CohomologyError::NotAnAction(format!("image of {s} out of range")));
            }
            GroupHom::new(m, m, row.to_vec())
                .ok()
                .filter(GroupHom::is_bijective)
                .ok_or_else(|| CohomologyError::NotAnAction(format!("{s} does not act by an automorphism")))?;
        }
        if m.elements().any(|x| self.act(gamma.identity(), x) != x) {
            return Err(CohomologyError::NotAnAction("identity acts nontrivially".into()));
        }
        for s in gamma.elements() {
            for t in gamma.elements() {
                let st = gamma.mul(s, t);
                if m.elements().any(|x| self.act(st, x) != self.act(s, self.act(t, x))) {
                    return Err(CohomologyError::NotAnAction(format!("composition fails at ({s}, {t})")));
                }
            }
        }
        Ok(())
    }

    /// Constant coefficients.
    pub fn trivial(gamma: &GroupRef, m: &GroupRef) -> Self {
        let action = gamma.elements().flat_map(|_| m.elements()).collect();
        GammaGroup { gamma: gamma.clone(), m: m.clone(), action }
    }

    /// Action given by automorphisms of `M` for the generators of `Γ`
    /// (in the order of `gamma.generators()`).
    pub fn from_generator_automorphisms(gamma: &GroupRef, m: &GroupRef, autos: &[GroupHom]) -> Result<Self> {
        let gens = gamma.generators();
        if autos.len() != gens.len() {
            return Err(CohomologyError::NotAnAction(format!(
                "expected {} generator automorphisms, got {}",
                gens.len(),
                autos.len()
            )));
        }
        if autos.iter().any(|a| !same_group(a.source(), m) || !same_group(a.target(), m) || !a.is_bijective()) {
            return Err(CohomologyError::NotAnAction("generator image is not an automorphism".into()));
        }
        let n = m.order();
        let mut action = vec![usize::MAX; gamma.order() * n];
        action[gamma.identity() * n..(gamma.identity() + 1) * n].copy_from_slice(&m.elements().collect::<Vec<_>>());
        let mut queue = std::collections::VecDeque::from([gamma.identity()]);
        while let Some(x) = queue.pop_front() {
            for (&g, auto) in gens.iter().zip(autos) {
                let y = gamma.mul(x, g);
                // (x g)(v) = x(g(v))
                let row: Vec<usize> = m.elements().map(|v| action[x * n + auto.apply(v)]).collect();
                if action[y * n] == usize::MAX {
                    action[y * n..(y + 1) * n].copy_from_slice(&row);
                    queue.push_back(y);
                } else if action[y * n..(y + 1) * n] != row[..] {
                    return Err(CohomologyError::NotAnAction("generator images violate the relations".into()));
                }
            }
        }
        let coeff = GammaGroup { gamma: gamma.clone(), m: m.clone(), action };
        coeff.validate()?;
        Ok(coeff)
    }

    /// Action through a homomorphism `rho: Γ -> Aut(M)`, with `Aut(M)` given
    /// as a permutation group whose element permutations are `perms`.
    pub fn from_permutation_representation(
        gamma: &GroupRef,
        m: &GroupRef,
        rho: &GroupHom,
        perms: &[Vec<usize>],
    ) -> Result<Self> {
        let action = gamma.elements().flat_map(|s| perms[rho.apply(s)].iter().copied()).collect();
        let coeff = GammaGroup { gamma: gamma.clone(), m: m.clone(), action };
        coeff.validate()?;
        Ok(coeff)
    }

    /// `sub` with `Γ` acting by conjugation through `phi0: Γ -> E`; returns
    /// the coefficients and the inclusion `M -> E`.
    pub fn conjugation(phi0: &GroupHom, sub: &Subgroup) -> Result<(Self, GroupHom)> {
        if !same_group(phi0.target(), sub.parent()) {
            return Err(CohomologyError::GroupMismatch);
        }
        let e = sub.parent();
        let (m, inclusion) = sub.to_group();
        let local: HashMap<usize, usize> = inclusion.map().iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let gamma = phi0.source();
        let mut action = Vec::with_capacity(gamma.order() * m.order());
        for s in gamma.elements() {
            let g = phi0.apply(s);
            for &x in sub.elements() {
                let y = e.conjugate(g, x);
                action.push(*local.get(&y).ok_or(CohomologyError::NotNormalized(s))?);
            }
        }
        let coeff = GammaGroup { gamma: gamma.clone(), m, action };
        debug_assert!(coeff.validate().is_ok());
        Ok((coeff, inclusion))
    }

    /// Coefficients pulled back along `theta: Γ' -> Γ`.
    pub fn pullback(&self, theta: &GroupHom) -> GammaGroup {
        assert!(same_group(theta.target(), &self.gamma), "pullback along a map into another group");
        let n = self.m.order();
        let action = theta
            .source()
            .elements()
            .flat_map(|s| {
                let t = theta.apply(s);
                self.action[t * n..(t + 1) * n].iter().copied()
            })
            .collect();
        GammaGroup { gamma: theta.source().clone(), m: self.m.clone(), action }
    }

    pub fn gamma(&self) -> &GroupRef {
        &self.gamma
    }

    pub fn m(&self) -> &GroupRef {
        &self.m
    }

    #[inline]
    pub fn act(&self, s: usize, x: usize) -> usize {
        self.action[s * self.m.order() + x]
    }

    pub fn action_rows(&self) -> Vec<Vec<usize>> {
        self.action.chunks(self.m.order()).map(<[usize]>::to_vec).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.gamma.elements().all(|s| self.m.elements().all(|x| self.act(s, x) == x))
    }
}

/// A 1-cocycle `Γ -> M`.
#[derive(Clone, Debug)]
pub struct Cocycle {
    parent: CoeffRef,
    values: Vec<usize>,
}

impl PartialEq for Cocycle {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && (Arc::ptr_eq(&self.parent, &other.parent) || self.parent == other.parent)
    }
}

impl Eq for Cocycle {}

impl Cocycle {
    /// Validates the cocycle identity on all pairs.
    pub fn new(parent: &CoeffRef, values: Vec<usize>) -> Result<Self> {
        let (gamma, m) = (parent.gamma(), parent.m());
        if values.len() != gamma.order() {
            return Err(CohomologyError::ValueCount { expected: gamma.order(), got: values.len() });
        }
        for &v in &values {
            m.check_element(v)?;
        }
        for s in gamma.elements() {
            for t in gamma.elements() {
                if values[gamma.mul(s, t)] != m.mul(values[s], parent.act(s, values[t])) {
                    return Err(CohomologyError::NotACocycle(s, t));
                }
            }
        }
        Ok(Cocycle { parent: parent.clone(), values })
    }

    pub fn trivial(parent: &CoeffRef) -> Self {
        Cocycle { parent: parent.clone(), values: vec![parent.m().identity(); parent.gamma().order()] }
    }

    /// The cocycle of a homomorphism into constant coefficients.
    pub fn from_hom(parent: &CoeffRef, hom: &GroupHom) -> Result<Self> {
        if !parent.is_constant() {
            return Err(CohomologyError::NotACocycleForThisAction);
        }
        Self::new(parent, hom.map().to_vec())
    }

    pub fn parent(&self) -> &CoeffRef {
        &self.parent
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    #[inline]
    pub fn value(&self, s: usize) -> usize {
        self.values[s]
    }

    pub fn is_trivial(&self) -> bool {
        let e = self.parent.m().identity();
        self.values.iter().all(|&v| v == e)
    }

    /// `σ -> c^-1 · a(σ) · σ(c)`
    pub fn twisted_by(&self, c: usize) -> Cocycle {
        Cocycle { parent: self.parent.clone(), values: coboundary_shift(&self.parent, &self.values, c) }
    }

    /// Lexicographically least cocycle in the class.
    pub fn canonical_form(&self) -> Vec<usize> {
        canonical_form(&self.parent, &self.values)
    }

    pub fn representative(&self) -> Cocycle {
        Cocycle { parent: self.parent.clone(), values: self.canonical_form() }
    }

    pub fn cohomologous_to(&self, other: &Cocycle) -> bool {
        cohomologous(self, other).is_some()
    }

    /// Same values over other (equal) coefficients.
    pub fn with_parent(&self, parent: &CoeffRef) -> Result<Cocycle> {
        if **parent != *self.parent {
            return Err(CohomologyError::ActionMismatch);
        }
        Ok(Cocycle { parent: parent.clone(), values: self.values.clone() })
    }
}

fn coboundary_shift(coeff: &GammaGroup, values: &[usize], c: usize) -> Vec<usize> {
    let m = coeff.m();
    let ci = m.inv(c);
    values.iter().enumerate().map(|(s, &v)| m.mul(m.mul(ci, v), coeff.act(s, c))).collect()
}

fn canonical_form(coeff: &GammaGroup, values: &[usize]) -> Vec<usize> {
    coeff
        .m()
        .elements()
        .map(|c| coboundary_shift(coeff, values, c))
        .min()
        .expect("M is nonempty")
}

/// A `c` with `b(σ) = c^-1 · a(σ) · σ(c)`, if any.
pub fn cohomologous(a: &Cocycle, b: &Cocycle) -> Option<usize> {
    if *a.parent != *b.parent {
        return None;
    }
    a.parent.m().elements().find(|&c| coboundary_shift(&a.parent, &a.values, c) == b.values)
}

/// Values on the generators of `Γ` determine a cocycle; seeds are extended
/// along the Cayley graph and then validated on all pairs.
pub fn enumerate_cocycles(coeff: &CoeffRef) -> Vec<Cocycle> {
    let (gamma, m) = (coeff.gamma(), coeff.m());
    let gens = gamma.generators();
    let candidates: Vec<Vec<usize>> = gens.iter().map(|_| m.elements().collect()).collect();
    let mut out = Vec::new();
    group::for_each_choice(&candidates, |seeds| {
        if let Some(values) = extend_cocycle(coeff, gens, seeds) {
            out.push(Cocycle::new(coeff, values).expect("edge-consistent extension is a cocycle"));
        }
    });
    out.sort_by(|a, b| a.values.cmp(&b.values));
    out
}

fn extend_cocycle(coeff: &GammaGroup, gens: &[usize], seeds: &[usize]) -> Option<Vec<usize>> {
    let (gamma, m) = (coeff.gamma(), coeff.m());
    let mut values = vec![usize::MAX; gamma.order()];
    values[gamma.identity()] = m.identity();
    let mut queue = std::collections::VecDeque::from([gamma.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&g, &seed) in gens.iter().zip(seeds) {
            let y = gamma.mul(x, g);
            let want = m.mul(values[x], coeff.act(x, seed));
            if values[y] == usize::MAX {
                values[y] = want;
                queue.push_back(y);
            } else if values[y] != want {
                return None;
            }
        }
    }
    Some(values)
}

/// `H^1(Γ, M)` as a partition of all cocycles.
#[derive(Clone, Debug)]
pub struct H1Classes {
    pub parent: CoeffRef,
    /// All cocycles, in lexicographic order.
    pub cocycles: Vec<Cocycle>,
    /// Indices into `cocycles`, one list per class, ordered by representative.
    pub classes: Vec<Vec<usize>>,
    /// The least cocycle of each class.
    pub representatives: Vec<Cocycle>,
    index: HashMap<Vec<usize>, usize>,
}

impl H1Classes {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class index of a cocycle over the same coefficients.
    pub fn class_of(&self, a: &Cocycle) -> Option<usize> {
        if *a.parent != *self.parent {
            return None;
        }
        self.index.get(&a.canonical_form()).copied()
    }

    /// Index of the class of the trivial cocycle.
    pub fn trivial_class(&self) -> usize {
        self.class_of(&Cocycle::trivial(&self.parent)).expect("trivial cocycle is enumerated")
    }
}

pub fn h1(coeff: &CoeffRef) -> H1Classes {
    let cocycles = enumerate_cocycles(coeff);
    let mut by_form: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, a) in cocycles.iter().enumerate() {
        by_form.entry(a.canonical_form()).or_default().push(i);
    }
    let mut classes = Vec::with_capacity(by_form.len());
    let mut representatives = Vec::with_capacity(by_form.len());
    let mut index = HashMap::with_capacity(by_form.len());
    for (form, members) in by_form {
        index.insert(form.clone(), classes.len());
        representatives.push(Cocycle { parent: coeff.clone(), values: form });
        classes.push(members);
    }
    H1Classes { parent: coeff.clone(), cocycles, classes, representatives, index }
}

/// One representative per class, without materializing the partition.
pub fn h1_representatives(coeff: &CoeffRef) -> Vec<Cocycle> {
    let mut forms: Vec<Vec<usize>> = enumerate_cocycles(coeff).iter().map(Cocycle::canonical_form).collect();
    forms.sort();
    forms.dedup();
    forms.into_iter().map(|values| Cocycle { parent: coeff.clone(), values }).collect()
}

/// `σ -> γ^-1( a(γ σ γ^-1) )`, the cocycle-level effect of pulling back along
/// conjugation by `γ` and multiplying by `γ^-1`.
///
/// The result equals `c · a(σ) · σ(c)^-1` for `c = γ^-1(a(γ))`, so it is
/// cohomologous to `a`; this is checked before returning.
pub fn inner_pullback(a: &Cocycle, g: usize) -> Cocycle {
    let coeff = &a.parent;
    let (gamma, m) = (coeff.gamma(), coeff.m());
    let gi = gamma.inv(g);
    let values: Vec<usize> = gamma
        .elements()
        .map(|s| coeff.act(gi, a.values[gamma.conjugate(g, s)]))
        .collect();
    let c = coeff.act(gi, a.values[g]);
    debug_assert!(gamma
        .elements()
        .all(|s| values[s] == m.mul(m.mul(c, a.values[s]), m.inv(coeff.act(s, c)))));
    let b = Cocycle { parent: coeff.clone(), values };
    assert_eq!(a.twisted_by(m.inv(c)).values, b.values, "inner pullback must be cohomologous");
    b
}

/// `γ -> embedding(a(γ)) · phi0(γ)`: the twist of a lift by a cocycle for the
/// conjugation action through `phi0`.
pub fn twist_lift(phi0: &GroupHom, embedding: &GroupHom, a: &Cocycle) -> Result<GroupHom> {
    let coeff = &a.parent;
    if !same_group(coeff.gamma(), phi0.source())
        || !same_group(coeff.m(), embedding.source())
        || !same_group(embedding.target(), phi0.target())
    {
        return Err(CohomologyError::NotACocycleForThisAction);
    }
    let e = phi0.target();
    for s in coeff.gamma().elements() {
        for x in coeff.m().elements() {
            if embedding.apply(coeff.act(s, x)) != e.conjugate(phi0.apply(s), embedding.apply(x)) {
                return Err(CohomologyError::NotACocycleForThisAction);
            }
        }
    }
    let map = coeff
        .gamma()
        .elements()
        .map(|s| e.mul(embedding.apply(a.values[s]), phi0.apply(s)))
        .collect();
    Ok(GroupHom::new(phi0.source(), e, map)?)
}

/// Lifts of a base map partitioned by conjugation by the kernel.
#[derive(Clone, Debug)]
pub struct LiftClasses {
    pub lifts: Vec<GroupHom>,
    /// Indices into `lifts`.
    pub classes: Vec<Vec<usize>>,
    /// `|H^1|` for the conjugation coefficients at the first lift, when one exists.
    pub h1_count: Option<usize>,
}

/// All lifts `φ: Γ' -> E` of `phibar: Γ' -> Γ`, up to conjugation by `A`.
///
/// When lifts exist their class count equals `|H^1(Γ', A)|` with `A` carrying
/// the conjugation action through the first lift; this is asserted.
pub fn lifts_up_to_conjugacy(ext: &Extension, phibar: &GroupHom) -> Result<LiftClasses> {
    if !same_group(phibar.target(), ext.gamma()) {
        return Err(CohomologyError::GroupMismatch);
    }
    let lifts: Vec<GroupHom> = group::enumerate_homs(phibar.source(), ext.e())
        .into_iter()
        .filter(|l| l.map().iter().zip(phibar.map()).all(|(&x, &y)| ext.pi().apply(x) == y))
        .collect();
    let classes = partition_by_conjugation(&lifts, ext.a_in_e().elements());
    let h1_count = match lifts.first() {
        None => None,
        Some(phi0) => {
            let (coeff, _) = GammaGroup::conjugation(phi0, ext.a_in_e())?;
            let count = h1_representatives(&Arc::new(coeff)).len();
            assert_eq!(count, classes.len(), "lift classes must match H^1");
            Some(count)
        }
    };
    Ok(LiftClasses { lifts, classes, h1_count })
}

/// `σ -> a(θ(σ))` over the pulled-back coefficients.
///
/// Panics if `theta` does not land in the group of `a`.
pub fn restrict_class(theta: &GroupHom, a: &Cocycle) -> Cocycle {
    let parent = Arc::new(a.parent.pullback(theta));
    let values = theta.map().iter().map(|&t| a.values[t]).collect();
    Cocycle { parent, values }
}

/// Inflation along a quotient map `q: E -> E'`.
pub fn inflate(q: &GroupHom, a: &Cocycle) -> Cocycle {
    restrict_class(q, a)
}

/// Pullback of a class over `E` along a local section `s: Γ_i -> E`,
/// landing in the expected local coefficients (`θ_i^* M`).
pub fn pullback_class(s: &GroupHom, a: &Cocycle, expected: &CoeffRef) -> Result<Cocycle> {
    if !same_group(s.target(), a.parent.gamma()) {
        return Err(CohomologyError::GroupMismatch);
    }
    let pulled = restrict_class(s, a);
    pulled.with_parent(expected)
}

/// The unique cocycle over `E'` inflating to `a`, for `q: E -> E'` surjective
/// with `a` trivial on `ker q` and `ker q` acting trivially.
pub fn descend_class(q: &GroupHom, a: &Cocycle) -> Result<Cocycle> {
    let coeff = &a.parent;
    if !same_group(q.source(), coeff.gamma()) {
        return Err(CohomologyError::GroupMismatch);
    }
    if !q.is_surjective() {
        return Err(CohomologyError::NotSurjective);
    }
    let m = coeff.m();
    let kernel = q.kernel();
    for &k in kernel.elements() {
        if m.elements().any(|x| coeff.act(k, x) != x) {
            return Err(CohomologyError::KernelActsNontrivially(k));
        }
        if a.values[k] != m.identity() {
            return Err(CohomologyError::NotTrivialOnKernel(k));
        }
    }
    let target = q.target();
    let n = m.order();
    let mut action = vec![usize::MAX; target.order() * n];
    let mut values = vec![usize::MAX; target.order()];
    for x in coeff.gamma().elements() {
        let y = q.apply(x);
        if values[y] == usize::MAX {
            values[y] = a.values[x];
            for v in m.elements() {
                action[y * n + v] = coeff.act(x, v);
            }
        }
        debug_assert_eq!(values[y], a.values[x]);
    }
    let parent = Arc::new(GammaGroup { gamma: target.clone(), m: m.clone(), action });
    Ok(Cocycle { parent, values })
}

/// Coefficients twisted by a cocycle, with the induced bijection on classes.
#[derive(Clone, Debug)]
pub struct TwistedCoefficients {
    /// `M` with action `σ * x = a(σ) · σ(x) · a(σ)^-1`.
    pub coeff: CoeffRef,
    /// Class index in `h1(original)` to class index in `h1(twisted)`.
    pub class_map: Vec<usize>,
    pub original: H1Classes,
    pub twisted: H1Classes,
    cocycle: Cocycle,
}

impl TwistedCoefficients {
    /// `b -> (σ -> b(σ) · a(σ)^-1)`
    pub fn transport(&self, b: &Cocycle) -> Result<Cocycle> {
        let m = self.coeff.m();
        let values = b
            .values
            .iter()
            .zip(&self.cocycle.values)
            .map(|(&x, &y)| m.mul(x, m.inv(y)))
            .collect();
        Cocycle::new(&self.coeff, values)
    }
}

pub fn twist_coefficients(coeff: &CoeffRef, a: &Cocycle) -> Result<TwistedCoefficients> {
    if *a.parent != **coeff {
        return Err(CohomologyError::ActionMismatch);
    }
    let (gamma, m) = (coeff.gamma(), coeff.m());
    let n = m.order();
    let mut action = Vec::with_capacity(gamma.order() * n);
    for s in gamma.elements() {
        let c = a.values[s];
        for x in m.elements() {
            action.push(m.conjugate(c, coeff.act(s, x)));
        }
    }
    let twisted_coeff = GammaGroup { gamma: gamma.clone(), m: m.clone(), action };
    twisted_coeff.validate()?;
    let twisted_coeff = Arc::new(twisted_coeff);
    let original = h1(coeff);
    let twisted = h1(&twisted_coeff);
    let mut out = TwistedCoefficients {
        coeff: twisted_coeff,
        class_map: Vec::new(),
        original,
        twisted,
        cocycle: a.clone(),
    };
    let mut class_map = Vec::with_capacity(out.original.len());
    for rep in &out.original.representatives {
        let image = out.transport(rep)?;
        class_map.push(out.twisted.class_of(&image).expect("transported cocycle is enumerated"));
    }
    out.class_map = class_map;
    let mut sorted = out.class_map.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), out.twisted.len(), "twisting must biject classes");
    let a_class = out.original.class_of(a).expect("a is enumerated");
    assert_eq!(out.class_map[a_class], out.twisted.trivial_class());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn inversion_on_c3() -> CoeffRef {
        let c2 = presets::cyclic(2);
        let c3 = presets::cyclic(3);
        Arc::new(GammaGroup::new(&c2, &c3, vec![vec![0, 1, 2], vec![0, 2, 1]]).unwrap())
    }

    #[test]
    fn cocycle_counts() {
        let c2 = presets::cyclic(2);
        let triv = Arc::new(GammaGroup::trivial(&c2, &c2));
        assert_eq!(enumerate_cocycles(&triv).len(), 2);
        assert_eq!(h1(&triv).len(), 2);

        let one = presets::cyclic(1);
        let any = Arc::new(GammaGroup::trivial(&one, &presets::symmetric(3)));
        assert_eq!(enumerate_cocycles(&any).len(), 1);
        assert_eq!(h1(&any).len(), 1);

        let inv = inversion_on_c3();
        assert_eq!(enumerate_cocycles(&inv).len(), 3);
        let classes = h1(&inv);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes.classes[0].len(), 3);
    }

    #[test]
    fn invalid_actions_rejected() {
        let c2 = presets::cyclic(2);
        let c3 = presets::cyclic(3);
        let bad = GammaGroup::new(&c2, &c3, vec![vec![0, 1, 2], vec![0, 0, 0]]);
        assert!(matches!(bad, Err(CohomologyError::NotAnAction(_))));
        let c3g = presets::cyclic(3);
        let inversion = GroupHom::new(&c3, &c3, vec![0, 2, 1]).unwrap();
        let bad = GammaGroup::from_generator_automorphisms(&c3g, &c3, &[inversion]);
        assert!(matches!(bad, Err(CohomologyError::NotAnAction(_))));
    }

    #[test]
    fn inner_pullback_examples() {
        let inv = inversion_on_c3();
        for a in enumerate_cocycles(&inv) {
            assert_eq!(inner_pullback(&a, 0), a);
        }
        let c4 = presets::cyclic(4);
        let triv = Arc::new(GammaGroup::trivial(&c4, &presets::cyclic(2)));
        for a in enumerate_cocycles(&triv) {
            for g in c4.elements() {
                assert_eq!(inner_pullback(&a, g), a);
            }
        }
        // S3 acting on C3 through the sign
        let s3 = presets::s3_over_c2();
        let sign = s3.pi().clone();
        let c3 = presets::cyclic(3);
        let coeff = Arc::new(GammaGroup::new(
            s3.e(),
            &c3,
            s3.e().elements().map(|g| if sign.apply(g) == 0 { vec![0, 1, 2] } else { vec![0, 2, 1] }).collect(),
        )
        .unwrap());
        let transposition = s3.e().elements().find(|&g| sign.apply(g) == 1).unwrap();
        let nontrivial: Vec<_> = enumerate_cocycles(&coeff).into_iter().filter(|a| !a.is_trivial()).collect();
        assert!(!nontrivial.is_empty());
        for a in nontrivial {
            let b = inner_pullback(&a, transposition);
            let c = coeff.act(transposition, a.value(transposition)); // γ^-1 = γ
            assert_eq!(a.twisted_by(c3.inv(c)), b);
            assert!(b.cohomologous_to(&a));
        }
    }

    #[test]
    fn twist_lift_examples() {
        let ext = presets::s3_over_c2();
        let sections = ext.sections();
        let phi0 = &sections[0];
        let (coeff, embedding) = GammaGroup::conjugation(phi0, ext.a_in_e()).unwrap();
        let coeff = Arc::new(coeff);
        assert_eq!(twist_lift(phi0, &embedding, &Cocycle::trivial(&coeff)).unwrap(), *phi0);
        let mut twisted: Vec<GroupHom> = enumerate_cocycles(&coeff)
            .iter()
            .map(|a| twist_lift(phi0, &embedding, a).unwrap())
            .collect();
        twisted.sort_by(|a, b| a.map().cmp(b.map()));
        assert_eq!(twisted, sections);

        // coefficients with the wrong action are refused
        let constant = Arc::new(GammaGroup::trivial(ext.gamma(), coeff.m()));
        let a = Cocycle::trivial(&constant);
        assert_eq!(twist_lift(phi0, &embedding, &a).unwrap_err(), CohomologyError::NotACocycleForThisAction);
    }

    #[test]
    fn lifts_examples() {
        let ext = presets::s3_over_c2();
        let c2 = ext.gamma().clone();
        let r = lifts_up_to_conjugacy(&ext, &GroupHom::identity(&c2)).unwrap();
        assert_eq!(r.lifts.len(), 3);
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.h1_count, Some(1));

        let nonsplit = presets::c4_over_c2();
        let r = lifts_up_to_conjugacy(&nonsplit, &GroupHom::identity(nonsplit.gamma())).unwrap();
        assert!(r.lifts.is_empty());
        assert_eq!(r.h1_count, None);

        // base map into the trivial group: lifts are homs into A
        let s3 = presets::symmetric(3);
        let trivial_ext = Extension::from_normal_subgroup(&crate::group::Subgroup::whole(&s3)).unwrap();
        let c2 = presets::cyclic(2);
        let r = lifts_up_to_conjugacy(&trivial_ext, &GroupHom::trivial(&c2, trivial_ext.gamma())).unwrap();
        assert_eq!(r.lifts.len(), 4);
        assert_eq!(r.classes.len(), 2);
    }

    #[test]
    fn restriction_examples() {
        let inv = inversion_on_c3();
        let a = enumerate_cocycles(&inv).pop().unwrap();
        assert_eq!(restrict_class(&GroupHom::identity(inv.gamma()), &a).values(), a.values());
        let one = presets::cyclic(1);
        assert!(restrict_class(&GroupHom::trivial(&one, inv.gamma()), &a).is_trivial());

        let ext = presets::s3_over_c2();
        let c3 = presets::cyclic(3);
        let sign_action = Arc::new(GammaGroup::new(
            ext.e(),
            &c3,
            ext.e().elements().map(|g| if ext.pi().apply(g) == 0 { vec![0, 1, 2] } else { vec![0, 2, 1] }).collect(),
        )
        .unwrap());
        let (a3, inclusion) = ext.a_in_e().to_group();
        let restricted_coeff = Arc::new(sign_action.pullback(&inclusion));
        assert!(restricted_coeff.is_constant());
        for b in enumerate_cocycles(&sign_action) {
            let r = restrict_class(&inclusion, &b);
            assert!(GroupHom::new(&a3, &c3, r.values().to_vec()).is_ok());
        }
    }

    #[test]
    fn pullback_examples() {
        let ext = presets::s3_over_c2();
        let gamma = ext.gamma();
        let c2 = presets::cyclic(2);
        let over_e = Arc::new(GammaGroup::trivial(ext.e(), &c2));
        let local = Arc::new(GammaGroup::trivial(gamma, &c2));
        let s = &ext.sections()[0];
        assert!(pullback_class(s, &Cocycle::trivial(&over_e), &local).unwrap().is_trivial());

        let sign = Cocycle::from_hom(&over_e, &GroupHom::new(ext.e(), &c2, ext.pi().map().to_vec()).unwrap()).unwrap();
        let pulled = pullback_class(s, &sign, &local).unwrap();
        assert_eq!(pulled.values(), ext.pi().compose(s).unwrap().map());

        for c in ext.a_in_e().elements() {
            let s2 = s.conjugated_by(*c);
            let p2 = pullback_class(&s2, &sign, &local).unwrap();
            assert!(p2.cohomologous_to(&pulled));
        }

        let c3 = presets::cyclic(3);
        let wrong = Arc::new(GammaGroup::trivial(gamma, &c3));
        assert_eq!(pullback_class(s, &sign, &wrong).unwrap_err(), CohomologyError::ActionMismatch);
    }

    #[test]
    fn descend_examples() {
        let c4 = presets::cyclic(4);
        let c2 = presets::cyclic(2);
        let coeff = Arc::new(GammaGroup::trivial(&c4, &c2));
        let mod2 = Cocycle::new(&coeff, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(descend_class(&GroupHom::identity(&c4), &mod2).unwrap().values(), mod2.values());
        let q = GroupHom::new(&c4, &c2, vec![0, 1, 0, 1]).unwrap();
        assert!(descend_class(&q, &Cocycle::trivial(&coeff)).unwrap().is_trivial());
        assert_eq!(descend_class(&q, &mod2).unwrap().values(), &[0, 1]);
        let faithful = Arc::new(GammaGroup::trivial(&c4, &c4));
        let id = Cocycle::new(&faithful, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(descend_class(&q, &id).unwrap_err(), CohomologyError::NotTrivialOnKernel(2));
    }

    #[test]
    fn twist_coefficient_examples() {
        let c2 = presets::cyclic(2);
        let s3 = presets::symmetric(3);
        let coeff = Arc::new(GammaGroup::trivial(&c2, &s3));
        let t = twist_coefficients(&coeff, &Cocycle::trivial(&coeff)).unwrap();
        assert_eq!(*t.coeff, *coeff);
        assert_eq!(t.class_map, (0..t.original.len()).collect::<Vec<_>>());

        let involution = s3.elements().find(|&x| s3.element_order(x) == 2).unwrap();
        let a = Cocycle::new(&coeff, vec![0, involution]).unwrap();
        let t = twist_coefficients(&coeff, &a).unwrap();
        assert_eq!(t.original.len(), t.twisted.len());
        for x in s3.elements() {
            assert_eq!(t.coeff.act(1, x), s3.conjugate(involution, x));
        }

        let inv = inversion_on_c3();
        let a = enumerate_cocycles(&inv).pop().unwrap();
        let t = twist_coefficients(&inv, &a).unwrap();
        assert_eq!(*t.coeff, *inv);
    }
}
