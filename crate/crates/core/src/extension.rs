//! Short exact sequences `1 -> A -> E -> Γ -> 1`, their sections, pushouts
//! along quotients of `A`, semidirect splittings and difference cocycles.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::cohomology::{Cocycle, CohomologyError, GammaGroup};
use crate::group::{self, same_group, FiniteGroup, GroupError, GroupHom, GroupRef, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("iota target and pi source differ")]
    GroupMismatch,
    #[error("iota is not injective (elements {0} and {1} collide)")]
    NotInjective(usize, usize),
    #[error("pi is not surjective ({0} is not hit)")]
    NotSurjective(usize),
    #[error("not exact at E: element {element} is in {}", if *in_kernel { "ker(pi) but not im(iota)" } else { "im(iota) but not ker(pi)" })]
    NotExact { element: usize, in_kernel: bool },
    #[error("U is not normal in E: conjugating {element} by {conjugator} leaves it")]
    NotNormalInE { conjugator: usize, element: usize },
    #[error("action is not a homomorphism into Aut(A): {0}")]
    NotAnAction(String),
    #[error("the two maps do not lift the same map to the base (differ at {0})")]
    NotALift(usize),
    #[error("difference at {0} escapes the target subgroup")]
    DifferenceEscapesA(usize),
    #[error("target subgroup is not normalized by the base lift (at {0})")]
    TargetNotNormalized(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

pub type Result<T, E = ExtensionError> = std::result::Result<T, E>;

/// A verified short exact sequence of finite groups.
#[derive(Clone, Debug)]
pub struct Extension {
    a: GroupRef,
    e: GroupRef,
    gamma: GroupRef,
    iota: GroupHom,
    pi: GroupHom,
    kernel: Subgroup,
}

impl Extension {
    /// Validates `1 -> A --iota--> E --pi--> Γ -> 1`.
    pub fn new(iota: GroupHom, pi: GroupHom) -> Result<Self> {
        if !same_group(iota.target(), pi.source()) {
            return Err(ExtensionError::GroupMismatch);
        }
        let image = iota.image();
        let kernel = pi.kernel();
        for g in pi.source().elements() {
            if image.contains(g) != kernel.contains(g) {
                return Err(ExtensionError::NotExact { element: g, in_kernel: kernel.contains(g) });
            }
        }
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for (x, &y) in iota.map().iter().enumerate() {
            if let Some(&prev) = seen.get(&y) {
                return Err(ExtensionError::NotInjective(prev, x));
            }
            seen.insert(y, x);
        }
        let hit = pi.image();
        if let Some(missing) = pi.target().elements().find(|&g| !hit.contains(g)) {
            return Err(ExtensionError::NotSurjective(missing));
        }
        debug_assert!(image.is_normal());
        Ok(Extension {
            a: iota.source().clone(),
            e: iota.target().clone(),
            gamma: pi.target().clone(),
            iota,
            pi,
            kernel: image,
        })
    }

    /// The extension `N -> E -> E/N` for a normal subgroup `N`.
    pub fn from_normal_subgroup(normal: &Subgroup) -> Result<Self> {
        let (_, iota) = normal.to_group();
        let (_, pi) = group::quotient(normal)?;
        Self::new(iota, pi)
    }

    pub fn a(&self) -> &GroupRef {
        &self.a
    }

    pub fn e(&self) -> &GroupRef {
        &self.e
    }

    pub fn gamma(&self) -> &GroupRef {
        &self.gamma
    }

    pub fn iota(&self) -> &GroupHom {
        &self.iota
    }

    pub fn pi(&self) -> &GroupHom {
        &self.pi
    }

    /// `im(iota)` as a subgroup of `E`.
    pub fn a_in_e(&self) -> &Subgroup {
        &self.kernel
    }

    /// Whether `s: Γ -> E` satisfies `pi ∘ s = id`.
    pub fn is_section(&self, s: &GroupHom) -> bool {
        same_group(s.source(), &self.gamma)
            && same_group(s.target(), &self.e)
            && self.gamma.elements().all(|g| self.pi.apply(s.apply(g)) == g)
    }

    pub fn sections(&self) -> Vec<GroupHom> {
        group::enumerate_homs(&self.gamma, &self.e)
            .into_iter()
            .filter(|s| self.is_section(s))
            .collect()
    }

    pub fn first_section(&self) -> Option<GroupHom> {
        self.sections().into_iter().next()
    }

    pub fn splits(&self) -> bool {
        self.first_section().is_some()
    }
}

/// All sections of an extension with their two conjugacy partitions.
#[derive(Clone, Debug)]
pub struct SectionReport {
    pub sections: Vec<GroupHom>,
    /// Classes under conjugation by `im(iota)`; indices into `sections`.
    pub classes_mod_a: Vec<Vec<usize>>,
    /// Classes under conjugation by all of `E`; indices into `sections`.
    pub classes_mod_e: Vec<Vec<usize>>,
}

pub fn enumerate_sections(ext: &Extension) -> SectionReport {
    let sections = ext.sections();
    let classes_mod_a = partition_by_conjugation(&sections, ext.a_in_e().elements());
    let all: Vec<usize> = ext.e().elements().collect();
    let classes_mod_e = partition_by_conjugation(&sections, &all);
    SectionReport { sections, classes_mod_a, classes_mod_e }
}

/// Partitions homs into a common target by `h ~ c h c^-1`, `c` in `conjugators`.
/// Conjugates that fall outside the list are ignored, so the result is the
/// restriction of the conjugacy relation to the list.
pub fn partition_by_conjugation(homs: &[GroupHom], conjugators: &[usize]) -> Vec<Vec<usize>> {
    let index: HashMap<&[usize], usize> = homs.iter().enumerate().map(|(i, h)| (h.map(), i)).collect();
    let mut class_of = vec![usize::MAX; homs.len()];
    let mut classes = Vec::new();
    for i in 0..homs.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        for &c in conjugators {
            let conj = homs[i].conjugated_by(c);
            if let Some(&j) = index.get(conj.map()) {
                if class_of[j] == usize::MAX {
                    class_of[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    classes
}

/// Pushout along `A -> A/U`: the extension `1 -> A/U -> E/iota(U) -> Γ -> 1`
/// together with the quotient map `E -> E/iota(U)`.
pub fn pushout(ext: &Extension, u: &Subgroup) -> Result<(Extension, GroupHom)> {
    if !same_group(u.parent(), ext.a()) {
        return Err(GroupError::GroupMismatch.into());
    }
    let image_mask: Vec<usize> = u.elements().iter().map(|&x| ext.iota().apply(x)).collect();
    let u_in_e = Subgroup::new(ext.e(), image_mask)?;
    if let Some((conjugator, element)) = u_in_e.normality_witness() {
        return Err(ExtensionError::NotNormalInE { conjugator, element });
    }
    let (e_bar, q_e) = group::quotient(&u_in_e)?;
    // U is normal in A because it is normal in E
    let (a_bar, q_a) = group::quotient(u)?;
    let mut iota_map = vec![0; a_bar.order()];
    for x in ext.a().elements() {
        iota_map[q_a.apply(x)] = q_e.apply(ext.iota().apply(x));
    }
    let mut pi_map = vec![0; e_bar.order()];
    for x in ext.e().elements() {
        pi_map[q_e.apply(x)] = ext.pi().apply(x);
    }
    let iota = GroupHom::new(&a_bar, &e_bar, iota_map)?;
    let pi = GroupHom::new(&e_bar, ext.gamma(), pi_map)?;
    Ok((Extension::new(iota, pi)?, q_e))
}

/// A split extension with its canonical section.
#[derive(Clone, Debug)]
pub struct SplitExtension {
    pub ext: Extension,
    pub section: GroupHom,
}

/// `A ⋊ Γ` on pairs `(a, γ)` with `(a,γ)(a',γ') = (a·γ(a'), γγ')`.
///
/// `action[γ]` is the automorphism of `A` by which `γ` acts. The pair
/// `(a, γ)` gets index `a * |Γ| + γ`.
pub fn semidirect(gamma: &GroupRef, a: &GroupRef, action: &[GroupHom]) -> Result<SplitExtension> {
    if action.len() != gamma.order() {
        return Err(ExtensionError::NotAnAction(format!(
            "expected {} automorphisms, got {}",
            gamma.order(),
            action.len()
        )));
    }
    for (g, phi) in action.iter().enumerate() {
        if !same_group(phi.source(), a) || !same_group(phi.target(), a) || !phi.is_bijective() {
            return Err(ExtensionError::NotAnAction(format!("image of {g} is not an automorphism")));
        }
    }
    for g in gamma.elements() {
        for h in gamma.elements() {
            let gh = gamma.mul(g, h);
            if a.elements().any(|x| action[gh].apply(x) != action[g].apply(action[h].apply(x))) {
                return Err(ExtensionError::NotAnAction(format!("composition fails at ({g}, {h})")));
            }
        }
    }
    let (na, ng) = (a.order(), gamma.order());
    let size = na * ng;
    let mut table = Vec::with_capacity(size * size);
    for x in 0..size {
        let (xa, xg) = (x / ng, x % ng);
        for y in 0..size {
            let (ya, yg) = (y / ng, y % ng);
            let pa = a.mul(xa, action[xg].apply(ya));
            table.push(pa * ng + gamma.mul(xg, yg));
        }
    }
    let e = Arc::new(FiniteGroup::from_trusted_table(size, table));
    let iota_map = a.elements().map(|x| x * ng + gamma.identity()).collect();
    let pi_map = (0..size).map(|x| x % ng).collect();
    let section_map = gamma.elements().map(|g| a.identity() * ng + g).collect();
    let iota = GroupHom::new_unchecked(a, &e, iota_map);
    let pi = GroupHom::new_unchecked(&e, gamma, pi_map);
    let section = GroupHom::new_unchecked(gamma, &e, section_map);
    Ok(SplitExtension { ext: Extension::new(iota, pi)?, section })
}

/// The difference `σ -> p(σ) p0(σ)^-1` of two lifts of the same map to the
/// base, as a cocycle valued in `target` with the source acting by
/// conjugation through `p0`.
pub fn lift_difference(
    p: &GroupHom,
    p0: &GroupHom,
    projection: &GroupHom,
    target: &Subgroup,
) -> Result<Cocycle> {
    if !same_group(p.source(), p0.source())
        || !same_group(p.target(), p0.target())
        || !same_group(projection.source(), p.target())
        || !same_group(target.parent(), p.target())
    {
        return Err(GroupError::GroupMismatch.into());
    }
    let ev = p.target();
    if let Some(s) = p.source().elements().find(|&s| projection.apply(p.apply(s)) != projection.apply(p0.apply(s))) {
        return Err(ExtensionError::NotALift(s));
    }
    let diffs: Vec<usize> = p.source().elements().map(|s| ev.mul(p.apply(s), ev.inv(p0.apply(s)))).collect();
    if let Some(s) = p.source().elements().find(|&s| !target.contains(diffs[s])) {
        return Err(ExtensionError::DifferenceEscapesA(s));
    }
    if let Some(s) = p
        .source()
        .elements()
        .find(|&s| target.elements().iter().any(|&x| !target.contains(ev.conjugate(p0.apply(s), x))))
    {
        return Err(ExtensionError::TargetNotNormalized(s));
    }
    let (coeff, embedding) = GammaGroup::conjugation(p0, target)?;
    let local: HashMap<usize, usize> = embedding.map().iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let values = diffs.iter().map(|d| local[d]).collect();
    Ok(Cocycle::new(&Arc::new(coeff), values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn c4_over_c2() -> Extension {
        let c4 = presets::cyclic(4);
        let c2 = presets::cyclic(2);
        let iota = GroupHom::new(&c2, &c4, vec![0, 2]).unwrap();
        let pi = GroupHom::new(&c4, &c2, vec![0, 1, 0, 1]).unwrap();
        Extension::new(iota, pi).unwrap()
    }

    #[test]
    fn make_extension_examples() {
        let g = presets::symmetric(3);
        let t = presets::cyclic(1);
        let ext = Extension::new(GroupHom::trivial(&t, &g), GroupHom::identity(&g)).unwrap();
        assert_eq!(ext.e().order(), 6);
        c4_over_c2();

        let c4 = presets::cyclic(4);
        let c2 = presets::cyclic(2);
        let iota = GroupHom::new(&c2, &c4, vec![0, 0]).unwrap();
        let pi = GroupHom::new(&c4, &c2, vec![0, 1, 0, 1]).unwrap();
        assert!(matches!(Extension::new(iota, pi), Err(ExtensionError::NotExact { element: 2, .. })));

        let iota = GroupHom::new(&c2, &c4, vec![0, 2]).unwrap();
        let pi = GroupHom::trivial(&c4, &c2);
        assert!(matches!(Extension::new(iota.clone(), pi), Err(ExtensionError::NotExact { .. })));

        let iota = GroupHom::trivial(&c2, &c2);
        let pi = GroupHom::trivial(&c2, &t);
        assert!(matches!(Extension::new(iota, pi), Err(ExtensionError::NotExact { .. })));
    }

    #[test]
    fn section_examples() {
        assert!(enumerate_sections(&c4_over_c2()).sections.is_empty());

        let c2 = presets::cyclic(2);
        let v4 = presets::klein();
        let direct = semidirect(&c2, &c2, &[GroupHom::identity(&c2), GroupHom::identity(&c2)]).unwrap();
        assert_eq!(direct.ext.e().order(), 4);
        assert!(!direct.ext.e().elements().any(|x| direct.ext.e().element_order(x) == 4));
        let r = enumerate_sections(&direct.ext);
        assert_eq!(r.sections.len(), 2);
        assert_eq!(r.classes_mod_a.len(), 2);
        assert_eq!(r.classes_mod_e.len(), 2);
        assert_eq!(v4.order(), 4);

        let ext = presets::s3_over_c2();
        let r = enumerate_sections(&ext);
        assert_eq!(r.sections.len(), 3);
        assert_eq!(r.classes_mod_a.len(), 1);
        assert_eq!(r.classes_mod_e.len(), 1);
    }

    #[test]
    fn pushout_examples() {
        let ext = presets::s3_over_c2();

        let (top, q) = pushout(&ext, &Subgroup::whole(ext.a())).unwrap();
        assert_eq!(top.a().order(), 1);
        assert_eq!(top.e().order(), 2);
        assert_eq!(q.map(), ext.pi().map());

        let (same, q) = pushout(&ext, &Subgroup::trivial(ext.a())).unwrap();
        assert_eq!(same.e().order(), 6);
        assert_eq!(q.map(), GroupHom::identity(ext.e()).map());

        let c6 = presets::cyclic(6);
        let c2 = presets::cyclic(2);
        let e = group::direct_product(&c6, &c2);
        let a_in_e = Subgroup::generated(&e, &[2]).unwrap(); // (1, 0)
        let ext = Extension::from_normal_subgroup(&a_in_e).unwrap();
        assert_eq!(ext.a().order(), 6);
        let u = Subgroup::new(ext.a(), ext.a().elements().filter(|&x| ext.a().element_order(x) <= 2)).unwrap();
        assert_eq!(u.order(), 2);
        let (po, q) = pushout(&ext, &u).unwrap();
        assert_eq!(po.a().order(), 3);
        assert!(po.a().is_abelian());
        assert_eq!(po.e().order(), 6);
        assert!(q.is_surjective());
    }

    #[test]
    fn pushout_requires_normality_in_e() {
        // A = C2 x C2 inside D4 = C2^2 ⋊ C2; a non-central order-2 subgroup of A
        let d4 = presets::dihedral(4);
        let klein = group::normal_subgroups(&d4)
            .into_iter()
            .find(|n| n.order() == 4 && n.elements().iter().all(|&x| d4.element_order(x) <= 2))
            .unwrap();
        let ext = Extension::from_normal_subgroup(&klein).unwrap();
        let bad = (0..ext.a().order())
            .map(|x| Subgroup::generated(ext.a(), &[x]).unwrap())
            .find(|u| {
                let img: Vec<usize> = u.elements().iter().map(|&x| ext.iota().apply(x)).collect();
                !Subgroup::new(ext.e(), img).unwrap().is_normal()
            })
            .unwrap();
        assert!(matches!(pushout(&ext, &bad), Err(ExtensionError::NotNormalInE { .. })));
    }

    #[test]
    fn semidirect_examples() {
        let c2 = presets::cyclic(2);
        let c3 = presets::cyclic(3);
        let inversion = GroupHom::new(&c3, &c3, vec![0, 2, 1]).unwrap();
        let split = semidirect(&c2, &c3, &[GroupHom::identity(&c3), inversion.clone()]).unwrap();
        assert_eq!(split.ext.e().order(), 6);
        assert!(!split.ext.e().is_abelian());
        assert!(split.ext.is_section(&split.section));
        assert_eq!(enumerate_sections(&split.ext).sections.len(), 3);

        let bad = semidirect(&c3, &c3, &[GroupHom::identity(&c3), inversion.clone(), inversion]);
        assert!(matches!(bad, Err(ExtensionError::NotAnAction(_))));
    }

    #[test]
    fn lift_difference_examples() {
        let c2 = presets::cyclic(2);
        let split = semidirect(&c2, &c2, &[GroupHom::identity(&c2), GroupHom::identity(&c2)]).unwrap();
        let ext = &split.ext;
        let id = GroupHom::identity(ext.e());
        let p0 = split.section.compose(ext.pi()).unwrap();

        let zero = lift_difference(&p0, &p0, ext.pi(), ext.a_in_e()).unwrap();
        assert!(zero.is_trivial());

        let d = lift_difference(&id, &p0, ext.pi(), ext.a_in_e()).unwrap();
        assert!(!d.is_trivial());
        // pulled back along the other section, the difference twists the
        // canonical section into it
        let sections = ext.sections();
        let other = sections.iter().find(|s| **s != split.section).unwrap();
        let local = crate::cohomology::restrict_class(other, &d);
        let (_, embedding) = ext.a_in_e().to_group();
        let twisted = crate::cohomology::twist_lift(&split.section, &embedding, &local).unwrap();
        assert_eq!(&twisted, other);

        let c4 = presets::cyclic(4);
        let proj = GroupHom::new(&c4, &c2, vec![0, 1, 0, 1]).unwrap();
        let neg = GroupHom::new(&c4, &c4, vec![0, 3, 2, 1]).unwrap();
        let r = lift_difference(&GroupHom::identity(&c4), &neg, &proj, &Subgroup::trivial(&c4));
        assert!(matches!(r, Err(ExtensionError::DifferenceEscapesA(1))));
        let r = lift_difference(&GroupHom::identity(&c4), &GroupHom::trivial(&c4, &c4), &proj, &Subgroup::whole(&c4));
        assert!(matches!(r, Err(ExtensionError::NotALift(1))));
    }
}
