//! Local-global interpolation of sections.
//!
//! Given an extension `1 -> A -> E -> Γ -> 1` and local sections
//! `s_i: Γ_i -> E` over maps `θ_i: Γ_i -> Γ`, this module decides:
//!
//! * (b): some hom `u: Γ -> E` has `u∘θ_i` conjugate to `s_i` in `E`;
//! * (c): some section `s` has `s∘θ_i` conjugate to `s_i` by elements of `A`;
//! * (a), (a'), (a''): for every coefficient system of a corpus and every
//!   class `α ∈ H^1(E, M)`, the evaluations `s_i^*(α)` come from one global
//!   class in `H^1(Γ, M)`;
//! * the covering condition: conjugates of the local images cover `Γ`.
//!
//! Everything is exact enumeration, so the implications between these
//! properties can be checked instance by instance.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::cohomology::{self, Cocycle, CoeffRef, GammaGroup};
use crate::extension::{self, Extension, ExtensionError};
use crate::group::{
    self, is_class_preserving, same_group, union_of_conjugates, GroupError, GroupHom, GroupRef, Subgroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalGlobalError {
    #[error("local map {0} does not land in the global group")]
    GroupMismatch(usize),
    #[error("local section {0} does not lie over its local map")]
    SectionMapMismatch(usize),
    #[error("incompatible tower: {0}")]
    IncompatibleTower(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

pub type Result<T, E = LocalGlobalError> = std::result::Result<T, E>;

/// Local maps `θ_i: Γ_i -> Γ`.
#[derive(Clone, Debug)]
pub struct LocalFamily {
    gamma: GroupRef,
    thetas: Vec<GroupHom>,
}

impl LocalFamily {
    pub fn new(gamma: &GroupRef, thetas: Vec<GroupHom>) -> Result<Self> {
        if let Some(i) = thetas.iter().position(|t| !same_group(t.target(), gamma)) {
            return Err(LocalGlobalError::GroupMismatch(i));
        }
        Ok(LocalFamily { gamma: gamma.clone(), thetas })
    }

    pub fn empty(gamma: &GroupRef) -> Self {
        LocalFamily { gamma: gamma.clone(), thetas: Vec::new() }
    }

    pub fn gamma(&self) -> &GroupRef {
        &self.gamma
    }

    pub fn thetas(&self) -> &[GroupHom] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

/// Local sections `s_i: Γ_i -> E` with `pi ∘ s_i = θ_i`.
#[derive(Clone, Debug)]
pub struct LocalSections {
    ext: Extension,
    family: LocalFamily,
    sections: Vec<GroupHom>,
}

impl LocalSections {
    /// The family is read off as `θ_i = pi ∘ s_i`.
    pub fn new(ext: &Extension, sections: Vec<GroupHom>) -> Result<Self> {
        let mut thetas = Vec::with_capacity(sections.len());
        for (i, s) in sections.iter().enumerate() {
            thetas.push(ext.pi().compose(s).map_err(|_| LocalGlobalError::GroupMismatch(i))?);
        }
        let family = LocalFamily::new(ext.gamma(), thetas)?;
        Ok(LocalSections { ext: ext.clone(), family, sections })
    }

    pub fn with_family(ext: &Extension, family: LocalFamily, sections: Vec<GroupHom>) -> Result<Self> {
        if !same_group(family.gamma(), ext.gamma()) || family.len() != sections.len() {
            return Err(LocalGlobalError::GroupMismatch(0));
        }
        for (i, (s, theta)) in sections.iter().zip(family.thetas()).enumerate() {
            let composed = ext.pi().compose(s).map_err(|_| LocalGlobalError::SectionMapMismatch(i))?;
            if composed != *theta {
                return Err(LocalGlobalError::SectionMapMismatch(i));
            }
        }
        Ok(LocalSections { ext: ext.clone(), family, sections })
    }

    pub fn ext(&self) -> &Extension {
        &self.ext
    }

    pub fn family(&self) -> &LocalFamily {
        &self.family
    }

    pub fn sections(&self) -> &[GroupHom] {
        &self.sections
    }
}

/// Whether the conjugates of all local images cover `Γ`.
pub fn check_density(family: &LocalFamily) -> bool {
    let mut covered = vec![false; family.gamma().order()];
    for theta in family.thetas() {
        for x in union_of_conjugates(&theta.image()).union {
            covered[x] = true;
        }
    }
    covered.into_iter().all(|b| b)
}

/// A family transported to a subgroup `Γ' ≤ Γ`.
#[derive(Clone, Debug)]
pub struct TransportedFamily {
    pub family: LocalFamily,
    /// Inclusion `Γ' -> Γ`.
    pub embedding: GroupHom,
    /// `(i, σ)` for each transported local.
    pub index: Vec<(usize, usize)>,
}

/// For each local `i` and each right coset `Γ'σ` (least representative),
/// the local group `θ_i^-1(σ^-1 Γ' σ)` with map `x -> σ θ_i(x) σ^-1`.
///
/// If the input covers `Γ` by conjugates, the output covers `Γ'`; this is
/// asserted.
pub fn transport_family(family: &LocalFamily, sub: &Subgroup) -> TransportedFamily {
    let gamma = family.gamma();
    assert!(same_group(sub.parent(), gamma), "subgroup of another group");
    let (sub_group, embedding) = sub.to_group();
    let local: HashMap<usize, usize> = embedding.map().iter().enumerate().map(|(i, &x)| (x, i)).collect();

    let mut reps = Vec::new();
    let mut seen = vec![false; gamma.order()];
    for s in gamma.elements() {
        if seen[s] {
            continue;
        }
        for &h in sub.elements() {
            seen[gamma.mul(h, s)] = true;
        }
        reps.push(s);
    }

    let mut thetas = Vec::new();
    let mut index = Vec::new();
    for (i, theta) in family.thetas().iter().enumerate() {
        for &s in &reps {
            let si = gamma.inv(s);
            let preimage: Vec<usize> = theta
                .source()
                .elements()
                .filter(|&x| sub.contains(gamma.conjugate(s, theta.apply(x))))
                .collect();
            let pre = Subgroup::new(theta.source(), preimage).expect("preimage of a subgroup");
            let (pre_group, inclusion) = pre.to_group();
            let map = inclusion.map().iter().map(|&x| local[&gamma.conjugate(s, theta.apply(x))]).collect();
            thetas.push(GroupHom::new(&pre_group, &sub_group, map).expect("conjugated restriction is a hom"));
            index.push((i, s));
            debug_assert!(pre.elements().iter().all(|&x| sub.contains(gamma.mul(gamma.mul(s, theta.apply(x)), si))));
        }
    }
    let out = TransportedFamily { family: LocalFamily { gamma: sub_group, thetas }, embedding, index };
    if check_density(family) {
        assert!(check_density(&out.family), "covering must pass to subgroups");
    }
    out
}

/// Classes `β ∈ H^1(Γ, M)` with `θ_i^*(β) ~ θ_i^*(α)` for every local.
/// Returns the class representatives.
pub fn diagonal_fibre(alpha: &Cocycle, family: &LocalFamily) -> Vec<Cocycle> {
    let coeff = alpha.parent();
    let target: Vec<Vec<usize>> = family
        .thetas()
        .iter()
        .map(|t| cohomology::restrict_class(t, alpha).canonical_form())
        .collect();
    cohomology::h1_representatives(coeff)
        .into_iter()
        .filter(|beta| {
            family
                .thetas()
                .iter()
                .zip(&target)
                .all(|(t, form)| cohomology::restrict_class(t, beta).canonical_form() == *form)
        })
        .collect()
}

/// A global map with, for each local, a conjugator `c_i` such that
/// `hom ∘ θ_i = c_i · s_i(-) · c_i^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpolation {
    pub hom: GroupHom,
    pub conjugators: Vec<usize>,
}

fn conjugator_for(e: &GroupRef, want: &[usize], s: &GroupHom, candidates: &[usize]) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .find(|&c| want.iter().zip(s.map()).all(|(&w, &x)| e.conjugate(c, x) == w))
}

fn interpolate(ls: &LocalSections, u: &GroupHom, candidates: &[usize]) -> Option<Vec<usize>> {
    let e = ls.ext.e();
    ls.family
        .thetas()
        .iter()
        .zip(&ls.sections)
        .map(|(theta, s)| {
            let want: Vec<usize> = theta.map().iter().map(|&x| u.apply(x)).collect();
            conjugator_for(e, &want, s, candidates)
        })
        .collect()
}

/// Whether `interp` interpolates `ls` with conjugators drawn from `allowed`.
pub fn validates(ls: &LocalSections, interp: &Interpolation, allowed: &Subgroup) -> bool {
    let e = ls.ext.e();
    interp.conjugators.len() == ls.sections.len()
        && ls.family.thetas().iter().zip(&ls.sections).zip(&interp.conjugators).all(|((theta, s), &c)| {
            allowed.contains(c)
                && theta.source().elements().all(|x| interp.hom.apply(theta.apply(x)) == e.conjugate(c, s.apply(x)))
        })
}

/// Property (b): the enumeration-least hom `Γ -> E` interpolating the local
/// sections up to conjugation in `E`.
pub fn decide_b(ls: &LocalSections) -> Option<Interpolation> {
    let all: Vec<usize> = ls.ext.e().elements().collect();
    group::enumerate_homs(ls.ext.gamma(), ls.ext.e()).into_iter().find_map(|u| {
        interpolate(ls, &u, &all).map(|conjugators| Interpolation { hom: u, conjugators })
    })
}

/// Property (c): the enumeration-least section interpolating the local
/// sections up to conjugation by `A`.
pub fn decide_c(ls: &LocalSections) -> Option<Interpolation> {
    let a = ls.ext.a_in_e().elements().to_vec();
    ls.ext.sections().into_iter().find_map(|s| {
        interpolate(ls, &s, &a).map(|conjugators| Interpolation { hom: s, conjugators })
    })
}

/// Where a corpus entry comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// A quotient of `E` with trivial action.
    ConstantQuotient,
    /// `A/V` with `Γ` acting by conjugation through a section.
    AQuotientWithSectionAction,
    /// Abelian `A/V` with the action induced by conjugation in `E`.
    AQuotientWithInducedAction,
    UserSupplied,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::ConstantQuotient => "constant-quotient-of-E",
            Provenance::AQuotientWithSectionAction => "A-quotient-with-section-action",
            Provenance::AQuotientWithInducedAction => "A-quotient-with-induced-action",
            Provenance::UserSupplied => "user-supplied",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    /// Coefficients over `Γ`.
    pub coeff: CoeffRef,
    pub provenance: Provenance,
    pub label: String,
}

/// Coefficient systems over `Γ` quantified over by the descent deciders.
#[derive(Clone, Debug, Default)]
pub struct CoefficientCorpus {
    pub entries: Vec<CorpusEntry>,
}

impl CoefficientCorpus {
    /// Quotients `E/N` with `|E/N| ≤ bound`, constant action, largest first.
    pub fn constant_quotients(ext: &Extension, bound: usize) -> Self {
        let entries = group::normal_subgroups(ext.e())
            .into_iter()
            .filter(|n| n.index() <= bound)
            .map(|n| {
                let (q, _) = group::quotient(&n).expect("normal");
                CorpusEntry {
                    coeff: Arc::new(GammaGroup::trivial(ext.gamma(), &q)),
                    provenance: Provenance::ConstantQuotient,
                    label: format!("E/N (|N|={})", n.order()),
                }
            })
            .collect();
        CoefficientCorpus { entries }
    }

    /// Quotients `A/V`, `V ≤ A` normal in `E`, with `Γ` acting by conjugation
    /// through `section`. Without a section only abelian `A/V` are kept,
    /// acting through conjugation by any preimage in `E`.
    pub fn a_quotients(ext: &Extension, section: Option<&GroupHom>) -> Self {
        let e = ext.e();
        let (a_group, inclusion) = ext.a_in_e().to_group();
        let local: HashMap<usize, usize> = inclusion.map().iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let lift_of: Vec<usize> = match section {
            Some(s) => s.map().to_vec(),
            None => {
                let mut lift = vec![usize::MAX; ext.gamma().order()];
                for x in e.elements().rev() {
                    lift[ext.pi().apply(x)] = x;
                }
                lift
            }
        };
        let mut entries = Vec::new();
        for v in group::normal_subgroups_within(ext.a_in_e()) {
            let v_local = Subgroup::new(&a_group, v.elements().iter().map(|x| local[x])).expect("V ≤ A");
            let (q, qmap) = group::quotient(&v_local).expect("V normal in A");
            if section.is_none() && !q.is_abelian() {
                continue;
            }
            let mut rows = vec![vec![usize::MAX; q.order()]; ext.gamma().order()];
            for g in ext.gamma().elements() {
                let c = lift_of[g];
                for x in a_group.elements() {
                    let y = local[&e.conjugate(c, inclusion.apply(x))];
                    rows[g][qmap.apply(x)] = qmap.apply(y);
                }
            }
            let coeff = GammaGroup::new(ext.gamma(), &q, rows).expect("conjugation descends to A/V");
            entries.push(CorpusEntry {
                coeff: Arc::new(coeff),
                provenance: if section.is_some() {
                    Provenance::AQuotientWithSectionAction
                } else {
                    Provenance::AQuotientWithInducedAction
                },
                label: format!("A/V (|V|={})", v.order()),
            });
        }
        CoefficientCorpus { entries }
    }

    /// The corpus used for (a): constant quotients of `E` together with the
    /// `A`-quotients for the least section (if any).
    pub fn default_for(ext: &Extension) -> Self {
        let section = ext.first_section();
        let mut corpus = Self::constant_quotients(ext, ext.e().order());
        corpus.entries.extend(Self::a_quotients(ext, section.as_ref()).entries);
        corpus
    }

    pub fn push_user(&mut self, coeff: CoeffRef, label: impl Into<String>) {
        self.entries.push(CorpusEntry { coeff, provenance: Provenance::UserSupplied, label: label.into() });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A class whose local evaluations do not come from a global class.
#[derive(Clone, Debug)]
pub struct DescentWitness {
    pub entry: usize,
    pub label: String,
    /// Representative of the class over `E`.
    pub class: Cocycle,
}

#[derive(Clone, Debug)]
pub struct DescentVerdict {
    pub holds: bool,
    pub witness: Option<DescentWitness>,
    pub classes_checked: usize,
}

fn surjective_on_a(ext: &Extension, alpha: &Cocycle) -> bool {
    let m = alpha.parent().m();
    let mut hit = vec![false; m.order()];
    for &x in ext.a_in_e().elements() {
        hit[alpha.value(x)] = true;
    }
    hit.into_iter().all(|b| b)
}

/// Checks every class over `E` (with `E` acting through `pi`) of every corpus
/// entry; `surjective_only` restricts to classes whose restriction to `A`
/// is onto the coefficients.
fn survives(ls: &LocalSections, corpus: &CoefficientCorpus, surjective_only: bool) -> DescentVerdict {
    let ext = &ls.ext;
    let mut checked = 0;
    for (idx, entry) in corpus.entries.iter().enumerate() {
        let coeff = &entry.coeff;
        assert!(same_group(coeff.gamma(), ext.gamma()), "corpus entry over another group");
        let diagonal: HashSet<Vec<Vec<usize>>> = cohomology::h1_representatives(coeff)
            .iter()
            .map(|beta| {
                ls.family
                    .thetas()
                    .iter()
                    .map(|t| cohomology::restrict_class(t, beta).canonical_form())
                    .collect()
            })
            .collect();
        let over_e = Arc::new(coeff.pullback(ext.pi()));
        for alpha in cohomology::h1_representatives(&over_e) {
            if surjective_only && !surjective_on_a(ext, &alpha) {
                continue;
            }
            checked += 1;
            let evaluations: Vec<Vec<usize>> = ls
                .sections
                .iter()
                .map(|s| cohomology::restrict_class(s, &alpha).canonical_form())
                .collect();
            if !diagonal.contains(&evaluations) {
                return DescentVerdict {
                    holds: false,
                    witness: Some(DescentWitness { entry: idx, label: entry.label.clone(), class: alpha }),
                    classes_checked: checked,
                };
            }
        }
    }
    DescentVerdict { holds: true, witness: None, classes_checked: checked }
}

/// Property (a) over an explicit corpus.
pub fn decide_a(ls: &LocalSections, corpus: &CoefficientCorpus) -> DescentVerdict {
    survives(ls, corpus, false)
}

/// Property (a'): constant coefficients, all quotients of `E` of order at
/// most `bound`.
pub fn decide_a_prime(ls: &LocalSections, bound: usize) -> DescentVerdict {
    survives(ls, &CoefficientCorpus::constant_quotients(&ls.ext, bound), false)
}

/// The corpus for (a''): the `A`-quotients with action through the least
/// section; without a section, the constant quotients together with the
/// abelian `A`-quotients carrying the induced action.
pub fn doubleprime_corpus(ext: &Extension) -> CoefficientCorpus {
    match ext.first_section() {
        Some(s) => CoefficientCorpus::a_quotients(ext, Some(&s)),
        None => {
            let mut corpus = CoefficientCorpus::constant_quotients(ext, ext.e().order());
            corpus.entries.extend(CoefficientCorpus::a_quotients(ext, None).entries);
            corpus
        }
    }
}

/// Property (a''): as (a) over [`doubleprime_corpus`], restricted to classes
/// that are surjective on `A`.
pub fn decide_a_doubleprime(ls: &LocalSections) -> DescentVerdict {
    survives(ls, &doubleprime_corpus(&ls.ext), true)
}

/// The section built from a (b)-witness `u` when `φ = pi ∘ u` is bijective:
/// `s = u ∘ φ^-1`, with conjugators `u(τ_i) γ_i` for
/// `τ_i = φ^-1(pi(γ_i)^-1)`.
#[derive(Clone, Debug)]
pub struct SectionFromHom {
    pub phi_class_preserving: bool,
    pub interpolation: Interpolation,
    /// Every conjugator lies in `A` and re-validates.
    pub conjugators_in_a: bool,
}

pub fn section_from_hom(ls: &LocalSections, witness: &Interpolation) -> Option<SectionFromHom> {
    let ext = &ls.ext;
    let e = ext.e();
    let phi = ext.pi().compose(&witness.hom).expect("u lands in E");
    let phi_inv = phi.inverse().ok()?;
    let s = witness.hom.compose(&phi_inv).expect("composable");
    let conjugators: Vec<usize> = witness
        .conjugators
        .iter()
        .map(|&g| {
            let sigma = ext.pi().apply(g);
            let tau = phi_inv.apply(ext.gamma().inv(sigma));
            e.mul(witness.hom.apply(tau), g)
        })
        .collect();
    let interpolation = Interpolation { hom: s, conjugators };
    let conjugators_in_a = ext.is_section(&interpolation.hom) && validates(ls, &interpolation, ext.a_in_e());
    Some(SectionFromHom { phi_class_preserving: is_class_preserving(&phi), interpolation, conjugators_in_a })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationCheck {
    pub name: &'static str,
    /// Whether the hypothesis of the implication holds on this instance.
    pub applicable: bool,
    pub holds: bool,
}

/// All six properties of one instance with the implications between them.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub a: bool,
    pub a_prime: bool,
    pub a_doubleprime: bool,
    pub b: bool,
    pub c: bool,
    pub star_star: bool,
    pub split: bool,
    pub b_witness: Option<Interpolation>,
    pub c_witness: Option<Interpolation>,
    pub a_failure: Option<DescentWitness>,
    pub a_prime_failure: Option<DescentWitness>,
    pub a_doubleprime_failure: Option<DescentWitness>,
    pub section_from_b: Option<SectionFromHom>,
    pub implications: Vec<ImplicationCheck>,
}

impl EquivalenceReport {
    pub fn violations(&self) -> Vec<&'static str> {
        self.implications.iter().filter(|c| c.applicable && !c.holds).map(|c| c.name).collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.violations().is_empty()
    }
}

pub fn verify_equivalences(ls: &LocalSections) -> EquivalenceReport {
    let ext = &ls.ext;
    let a_verdict = decide_a(ls, &CoefficientCorpus::default_for(ext));
    let a_prime_verdict = decide_a_prime(ls, ext.e().order());
    let a2_verdict = decide_a_doubleprime(ls);
    let b_witness = decide_b(ls);
    let c_witness = decide_c(ls);
    let star_star = check_density(&ls.family);
    let split = ext.splits();
    let (a, a_prime, a_doubleprime) = (a_verdict.holds, a_prime_verdict.holds, a2_verdict.holds);
    let (b, c) = (b_witness.is_some(), c_witness.is_some());

    let b_valid = b_witness.as_ref().map_or(true, |w| validates(ls, w, &Subgroup::whole(ext.e())));
    let c_valid = c_witness
        .as_ref()
        .map_or(true, |w| ext.is_section(&w.hom) && validates(ls, w, ext.a_in_e()));
    let section_from_b = match (&b_witness, star_star) {
        (Some(w), true) => section_from_hom(ls, w),
        _ => None,
    };

    let implications = vec![
        ImplicationCheck { name: "witnesses re-validate", applicable: true, holds: b_valid && c_valid },
        ImplicationCheck { name: "(c) => (a)", applicable: c, holds: a },
        ImplicationCheck { name: "(a) => (a')", applicable: a, holds: a_prime },
        ImplicationCheck { name: "(a) => (a'')", applicable: a, holds: a_doubleprime },
        ImplicationCheck { name: "(b) => (a')", applicable: b, holds: a_prime },
        ImplicationCheck { name: "(a') => (b)", applicable: a_prime, holds: b },
        ImplicationCheck { name: "(a'') & split => (c)", applicable: a_doubleprime && split, holds: c },
        ImplicationCheck {
            name: "(**) => (a) = (a') = (b) = (c)",
            applicable: star_star,
            holds: a == a_prime && a == b && a == c,
        },
        ImplicationCheck { name: "(**) => (a) = (a'') & split", applicable: star_star, holds: a == (a_doubleprime && split) },
        ImplicationCheck {
            name: "(**) & (b) => pi∘u class preserving and bijective",
            applicable: star_star && b,
            holds: section_from_b.as_ref().is_some_and(|s| s.phi_class_preserving),
        },
        ImplicationCheck {
            name: "(**) & (b) => constructed section interpolates in A",
            applicable: star_star && b,
            holds: section_from_b.as_ref().is_some_and(|s| s.conjugators_in_a),
        },
    ];

    EquivalenceReport {
        a,
        a_prime,
        a_doubleprime,
        b,
        c,
        star_star,
        split,
        b_witness,
        c_witness,
        a_failure: a_verdict.witness,
        a_prime_failure: a_prime_verdict.witness,
        a_doubleprime_failure: a2_verdict.witness,
        section_from_b,
        implications,
    }
}

/// Extensions of one `Γ` linked by surjections `E_{j+1} -> E_j`; level 0 is
/// the coarsest, the last level is the top.
#[derive(Clone, Debug)]
pub struct Tower {
    levels: Vec<Extension>,
    maps: Vec<GroupHom>,
}

impl Tower {
    pub fn new(levels: Vec<Extension>, maps: Vec<GroupHom>) -> Result<Self> {
        let bad = |msg: String| Err(LocalGlobalError::IncompatibleTower(msg));
        if levels.is_empty() {
            return bad("no levels".into());
        }
        if maps.len() + 1 != levels.len() {
            return bad(format!("{} levels need {} maps, got {}", levels.len(), levels.len() - 1, maps.len()));
        }
        for (j, q) in maps.iter().enumerate() {
            let (lower, upper) = (&levels[j], &levels[j + 1]);
            if !same_group(lower.gamma(), upper.gamma()) {
                return bad(format!("levels {j} and {} have different base groups", j + 1));
            }
            if !same_group(q.source(), upper.e()) || !same_group(q.target(), lower.e()) {
                return bad(format!("map {j} does not connect levels {} and {j}", j + 1));
            }
            if !q.is_surjective() {
                return bad(format!("map {j} is not surjective"));
            }
            if upper.e().elements().any(|x| lower.pi().apply(q.apply(x)) != upper.pi().apply(x)) {
                return bad(format!("map {j} does not commute with the projections"));
            }
        }
        Ok(Tower { levels, maps })
    }

    /// Levels `E/U_0, E/U_1, ..., E` for a decreasing chain of subgroups of
    /// `A` normal in `E`, given inside `A` or inside `E`.
    pub fn from_chain(ext: &Extension, chain: &[Subgroup]) -> Result<Self> {
        let mut levels = Vec::new();
        let mut quotient_maps = Vec::new();
        for u in chain {
            let u = if same_group(u.parent(), ext.e()) && !same_group(ext.a(), ext.e()) {
                let pre = ext.a().elements().filter(|&x| u.contains(ext.iota().apply(x)));
                let u_in_a = Subgroup::new(ext.a(), pre)?;
                if u_in_a.order() != u.order() {
                    return Err(LocalGlobalError::IncompatibleTower("chain leaves A".into()));
                }
                u_in_a
            } else {
                u.clone()
            };
            let (level, q) = extension::pushout(ext, &u)?;
            levels.push(level);
            quotient_maps.push(q);
        }
        levels.push(ext.clone());
        quotient_maps.push(GroupHom::identity(ext.e()));
        let mut maps = Vec::new();
        for j in 0..chain.len() {
            maps.push(factor_through(&quotient_maps[j + 1], &quotient_maps[j]).map_err(|_| {
                LocalGlobalError::IncompatibleTower(format!("chain is not decreasing at {j}"))
            })?);
        }
        Self::new(levels, maps)
    }

    pub fn levels(&self) -> &[Extension] {
        &self.levels
    }

    pub fn maps(&self) -> &[GroupHom] {
        &self.maps
    }

    pub fn top(&self) -> &Extension {
        self.levels.last().expect("nonempty")
    }

    /// Composite map from the top group to level `j`.
    pub fn down_to(&self, j: usize) -> GroupHom {
        let mut map = GroupHom::identity(self.top().e());
        for k in (j..self.maps.len()).rev() {
            map = self.maps[k].compose(&map).expect("consecutive levels");
        }
        map
    }
}

/// `F -> C` with `fine = F ∘ ...`, i.e. the map `h` with `h ∘ fine = coarse`.
pub fn factor_through(fine: &GroupHom, coarse: &GroupHom) -> Result<GroupHom> {
    if !same_group(fine.source(), coarse.source()) || !fine.is_surjective() {
        return Err(GroupError::GroupMismatch.into());
    }
    let mut map = vec![usize::MAX; fine.target().order()];
    for x in fine.source().elements() {
        let y = fine.apply(x);
        if map[y] == usize::MAX {
            map[y] = coarse.apply(x);
        } else if map[y] != coarse.apply(x) {
            return Err(GroupError::NotAHomomorphism(x, x).into());
        }
    }
    Ok(GroupHom::new(fine.target(), coarse.target(), map)?)
}

/// Witness sets of every level and, when all are nonempty, a compatible
/// chain of interpolating homs with compatible conjugators.
#[derive(Clone, Debug)]
pub struct TowerOutcome {
    /// `|S_G|` per level.
    pub level_sizes: Vec<usize>,
    /// The coarsest level with no interpolating hom.
    pub empty_level: Option<usize>,
    /// One interpolation per level, coarse to fine.
    pub chain: Option<Vec<Interpolation>>,
}

/// Per-level sets `S_G` of homs `Γ -> E_j` interpolating the pushed-down
/// local sections, searched depth first from the coarsest level for a chain
/// that is compatible under the connecting maps, conjugators included.
pub fn tower_limit_sections(tower: &Tower, top_sections: &[GroupHom]) -> Result<TowerOutcome> {
    let top = tower.top();
    let top_ls = LocalSections::new(top, top_sections.to_vec())?;
    let per_level: Vec<LocalSections> = (0..tower.levels.len())
        .map(|j| {
            let down = tower.down_to(j);
            let sections = top_sections.iter().map(|s| down.compose(s).expect("lands in top")).collect();
            LocalSections::with_family(&tower.levels[j], top_ls.family.clone(), sections)
        })
        .collect::<Result<_>>()?;

    // S_G together with the full conjugator sets C_{i,G} for each member
    let witness_sets: Vec<Vec<(GroupHom, Vec<Vec<usize>>)>> = per_level
        .iter()
        .map(|ls| {
            let e = ls.ext.e();
            group::enumerate_homs(ls.ext.gamma(), e)
                .into_iter()
                .filter_map(|u| {
                    let sets: Vec<Vec<usize>> = ls
                        .family
                        .thetas()
                        .iter()
                        .zip(&ls.sections)
                        .map(|(theta, s)| {
                            let want: Vec<usize> = theta.map().iter().map(|&x| u.apply(x)).collect();
                            e.elements()
                                .filter(|&c| want.iter().zip(s.map()).all(|(&w, &x)| e.conjugate(c, x) == w))
                                .collect()
                        })
                        .collect();
                    sets.iter().all(|c| !c.is_empty()).then_some((u, sets))
                })
                .collect()
        })
        .collect();

    let level_sizes: Vec<usize> = witness_sets.iter().map(Vec::len).collect();
    if let Some(empty) = level_sizes.iter().position(|&n| n == 0) {
        return Ok(TowerOutcome { level_sizes, empty_level: Some(empty), chain: None });
    }

    let mut picked: Vec<usize> = Vec::new();
    let chain = search_chain(tower, &witness_sets, &mut picked).map(|conjugators| {
        picked
            .iter()
            .enumerate()
            .map(|(j, &k)| Interpolation {
                hom: witness_sets[j][k].0.clone(),
                conjugators: conjugators.iter().map(|per_local| per_local[j]).collect(),
            })
            .collect()
    });
    Ok(TowerOutcome { level_sizes, empty_level: None, chain })
}

type WitnessSet = Vec<(GroupHom, Vec<Vec<usize>>)>;

/// Depth-first choice of one hom per level, compatible under the maps.
/// Returns compatible conjugator chains, indexed `[local][level]`.
fn search_chain(tower: &Tower, sets: &[WitnessSet], picked: &mut Vec<usize>) -> Option<Vec<Vec<usize>>> {
    let j = picked.len();
    if j == sets.len() {
        let locals = sets[0][picked[0]].1.len();
        let mut out = Vec::with_capacity(locals);
        for i in 0..locals {
            let mut chosen = Vec::new();
            if !search_conjugators(tower, sets, picked, i, &mut chosen) {
                return None;
            }
            out.push(chosen);
        }
        return Some(out);
    }
    for k in 0..sets[j].len() {
        if j > 0 {
            let q = &tower.maps[j - 1];
            let below = &sets[j - 1][picked[j - 1]].0;
            if q.compose(&sets[j][k].0).expect("levels connect").map() != below.map() {
                continue;
            }
        }
        picked.push(k);
        if let Some(found) = search_chain(tower, sets, picked) {
            return Some(found);
        }
        picked.pop();
    }
    None
}

fn search_conjugators(tower: &Tower, sets: &[WitnessSet], picked: &[usize], i: usize, chosen: &mut Vec<usize>) -> bool {
    let j = chosen.len();
    if j == sets.len() {
        return true;
    }
    for &c in &sets[j][picked[j]].1[i] {
        if j > 0 && tower.maps[j - 1].apply(c) != chosen[j - 1] {
            continue;
        }
        chosen.push(c);
        if search_conjugators(tower, sets, picked, i, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn inclusion_family(gamma: &GroupRef, subs: &[Subgroup]) -> LocalFamily {
        LocalFamily::new(gamma, subs.iter().map(|s| s.to_group().1).collect()).unwrap()
    }

    #[test]
    fn density_examples() {
        let s3 = presets::symmetric_perm(3);
        let g = &s3.group;
        assert!(check_density(&LocalFamily::new(g, vec![GroupHom::identity(g)]).unwrap()));
        let c2 = presets::cyclic(2);
        assert!(!check_density(&LocalFamily::new(&c2, vec![GroupHom::trivial(&c2, &c2)]).unwrap()));
        let t = Subgroup::generated(g, &[s3.element(&[1, 0, 2])]).unwrap();
        let a3 = Subgroup::generated(g, &[s3.element(&[1, 2, 0])]).unwrap();
        assert!(check_density(&inclusion_family(g, &[t.clone(), a3.clone()])));
        assert!(!check_density(&inclusion_family(g, &[t])));
        assert!(!check_density(&inclusion_family(g, &[a3])));
        assert!(!check_density(&LocalFamily::empty(g)));
    }

    #[test]
    fn transport_examples() {
        let s3 = presets::symmetric_perm(3);
        let g = &s3.group;
        let a3 = Subgroup::generated(g, &[s3.element(&[1, 2, 0])]).unwrap();
        let t = Subgroup::generated(g, &[s3.element(&[1, 0, 2])]).unwrap();
        let family = inclusion_family(g, &[t, a3.clone()]);

        let whole = transport_family(&family, &Subgroup::whole(g));
        assert_eq!(whole.family.len(), 2);
        assert!(check_density(&whole.family));

        let trivial = transport_family(&family, &Subgroup::trivial(g));
        assert_eq!(trivial.family.len(), 2 * 6);
        assert!(trivial.family.thetas().iter().all(|t| t.target().order() == 1));
        assert!(check_density(&trivial.family));

        let only_a3 = inclusion_family(g, &[a3.clone()]);
        let moved = transport_family(&only_a3, &a3);
        assert_eq!(moved.family.len(), 2);
        assert!(check_density(&moved.family));
    }

    #[test]
    fn fibre_examples() {
        let s3 = presets::symmetric(3);
        let c2 = presets::cyclic(2);
        let coeff = Arc::new(GammaGroup::trivial(&s3, &c2));
        let trivial = Cocycle::trivial(&coeff);
        assert_eq!(diagonal_fibre(&trivial, &LocalFamily::empty(&s3)).len(), 2);
        let id = LocalFamily::new(&s3, vec![GroupHom::identity(&s3)]).unwrap();
        assert_eq!(diagonal_fibre(&trivial, &id), vec![trivial.clone()]);
        let a3 = group::normal_subgroups(&s3).into_iter().find(|n| n.order() == 3).unwrap();
        let fibre = diagonal_fibre(&trivial, &inclusion_family(&s3, &[a3]));
        assert_eq!(fibre.len(), 2);
        assert!(fibre.iter().any(|b| !b.is_trivial()));
    }

    #[test]
    fn nonsplit_c4_instance() {
        let ext = presets::c4_over_c2();
        assert!(!ext.splits());
        let one = presets::cyclic(1);
        let trivial_local = GroupHom::trivial(&one, ext.e());
        let ls = LocalSections::new(&ext, vec![trivial_local]).unwrap();
        let b = decide_b(&ls).unwrap();
        assert!(b.hom.map().iter().all(|&x| x == 0));
        let empty = LocalSections::new(&ext, vec![]).unwrap();
        assert!(decide_b(&empty).is_some());
        assert!(group::enumerate_homs(ext.gamma(), ext.e()).iter().any(|u| u.map() == [0, 2]));
        assert!(decide_c(&ls).is_none());
        let report = verify_equivalences(&ls);
        assert!(report.b && !report.c && !report.star_star);
        assert!(report.is_consistent(), "{:?}", report.violations());
    }

    #[test]
    fn global_section_restrictions_satisfy_everything() {
        let ext = presets::s3_over_c2();
        let gamma = ext.gamma().clone();
        let s = ext.sections()[1].clone();
        let ls = LocalSections::new(&ext, vec![s.clone()]).unwrap();
        assert_eq!(decide_c(&ls).unwrap().hom, ext.sections()[0]);
        let report = verify_equivalences(&ls);
        assert!(report.a && report.a_prime && report.a_doubleprime && report.b && report.c && report.star_star);
        assert!(report.is_consistent());
        assert_eq!(gamma.order(), 2);
    }

    #[test]
    fn constant_coefficients_cannot_be_surjective_on_a() {
        // Γ = C2 acting on A = C3 by inversion, E = S3
        let ext = presets::s3_over_c2();
        let constant = CoefficientCorpus::constant_quotients(&ext, 6);
        for entry in &constant.entries {
            let over_e = Arc::new(entry.coeff.pullback(ext.pi()));
            for alpha in cohomology::h1_representatives(&over_e) {
                assert!(!surjective_on_a(&ext, &alpha) || entry.coeff.m().order() == 1);
            }
        }
        let twisted = CoefficientCorpus::a_quotients(&ext, ext.first_section().as_ref());
        let c3 = twisted.entries.iter().find(|e| e.coeff.m().order() == 3).unwrap();
        assert!(!c3.coeff.is_constant());
        let over_e = Arc::new(c3.coeff.pullback(ext.pi()));
        assert!(cohomology::h1_representatives(&over_e).iter().any(|a| surjective_on_a(&ext, a)));

        let sections = ext.sections();
        let ls = LocalSections::new(&ext, vec![sections[0].clone(), sections[1].clone()]).unwrap();
        let report = verify_equivalences(&ls);
        assert!(report.c && report.a && report.a_doubleprime);
    }

    #[test]
    fn descent_failure_on_mismatched_locals() {
        // Γ = C2 x C2 split over A = C2 x C2 trivially: E = C2^4; two locals
        // through the same map with non-conjugate sections.
        let c2 = presets::cyclic(2);
        let split = crate::extension::semidirect(&c2, &c2, &[GroupHom::identity(&c2), GroupHom::identity(&c2)]).unwrap();
        let ext = split.ext;
        let sections = ext.sections();
        assert_eq!(sections.len(), 2);
        let ls = LocalSections::new(&ext, vec![sections[0].clone(), sections[1].clone()]).unwrap();
        let verdict = decide_a_prime(&ls, 4);
        assert!(!verdict.holds);
        assert!(verdict.witness.is_some());
        assert!(decide_b(&ls).is_none());
        let report = verify_equivalences(&ls);
        assert!(report.is_consistent(), "{:?}", report.violations());
        assert!(!report.a && !report.c && !report.a_doubleprime && report.star_star);
    }

    #[test]
    fn empty_corpus_is_vacuous() {
        let ext = presets::c4_over_c2();
        let ls = LocalSections::new(&ext, vec![]).unwrap();
        assert!(decide_a(&ls, &CoefficientCorpus::default()).holds);
    }

    #[test]
    fn trivial_a_makes_doubleprime_vacuous() {
        let g = presets::symmetric(3);
        let ext = Extension::new(GroupHom::trivial(&presets::cyclic(1), &g), GroupHom::identity(&g)).unwrap();
        let c2 = Subgroup::generated(&g, &[g.elements().find(|&x| g.element_order(x) == 2).unwrap()]).unwrap();
        let (c2g, incl) = c2.to_group();
        let ls = LocalSections::new(&ext, vec![incl]).unwrap();
        assert_eq!(c2g.order(), 2);
        assert!(decide_a_doubleprime(&ls).holds);
    }

    #[test]
    fn towers() {
        let ext = presets::s3_over_c2();
        let s = ext.sections()[0].clone();
        let single = Tower::new(vec![ext.clone()], vec![]).unwrap();
        let out = tower_limit_sections(&single, std::slice::from_ref(&s)).unwrap();
        let ls = LocalSections::new(&ext, vec![s.clone()]).unwrap();
        assert_eq!(out.chain.unwrap()[0].hom, decide_b(&ls).unwrap().hom);

        let two = Tower::from_chain(&ext, &[Subgroup::whole(ext.a())]).unwrap();
        let out = tower_limit_sections(&two, std::slice::from_ref(&s)).unwrap();
        let chain = out.chain.unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(two.maps()[0].compose(&chain[1].hom).unwrap().map(), chain[0].hom.map());

        let c2 = presets::cyclic(2);
        let split = crate::extension::semidirect(&c2, &c2, &[GroupHom::identity(&c2), GroupHom::identity(&c2)]).unwrap();
        let sections = split.ext.sections();
        let tower = Tower::from_chain(&split.ext, &[Subgroup::whole(split.ext.a())]).unwrap();
        let out = tower_limit_sections(&tower, &[sections[0].clone(), sections[1].clone()]).unwrap();
        assert_eq!(out.empty_level, Some(1));
        assert!(out.chain.is_none());
    }

    #[test]
    fn tower_validation() {
        let ext = presets::s3_over_c2();
        let other = presets::c4_over_c2();
        let r = Tower::new(vec![other.clone(), ext.clone()], vec![GroupHom::trivial(ext.e(), other.e())]);
        assert!(matches!(r, Err(LocalGlobalError::IncompatibleTower(_))));
        let r = Tower::new(vec![ext.clone(), ext.clone()], vec![]);
        assert!(matches!(r, Err(LocalGlobalError::IncompatibleTower(_))));
    }
}
