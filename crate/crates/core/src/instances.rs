//! Seeded random instances: local sections, covering families with a
//! subgroup, and towers.
//!
//! The same seed always produces the same instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::extension::Extension;
use crate::group::{self, GroupHom, GroupRef, Subgroup};
use crate::localglobal::{check_density, LocalFamily, LocalSections, Tower};
use crate::presets;

pub const MAX_LOCALS: usize = 3;

/// Draws instances from the extensions of catalog groups of order at most
/// `max_order`.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    extensions: Vec<Extension>,
    bases: Vec<GroupRef>,
}

impl InstanceGenerator {
    pub fn new(seed: u64, max_order: usize) -> Self {
        let extensions = presets::extension_corpus(max_order);
        let bases = presets::catalog(max_order);
        InstanceGenerator { rng: ChaCha8Rng::seed_from_u64(seed), extensions, bases }
    }

    pub fn extensions(&self) -> &[Extension] {
        &self.extensions
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A random extension from the pool.
    pub fn extension(&mut self) -> Extension {
        self.extensions.choose(&mut self.rng).expect("pool is nonempty").clone()
    }

    /// Random local sections (between 0 and [`MAX_LOCALS`]) of a random
    /// extension.
    pub fn local_sections(&mut self) -> LocalSections {
        let ext = self.extension();
        self.local_sections_for(&ext)
    }

    /// Random local sections of `ext`. Each local group is a subgroup of `Γ`
    /// mapped in by a conjugated inclusion; its section is a random lift, a
    /// conjugate of a global section restricted, or a conjugate of a global
    /// hom restricted.
    pub fn local_sections_for(&mut self, ext: &Extension) -> LocalSections {
        let gamma = ext.gamma();
        let subgroups = group::all_subgroups(gamma);
        let sections = ext.sections();
        let homs = group::enumerate_homs(gamma, ext.e());
        let count = self.rng.gen_range(0..=MAX_LOCALS);
        let cover = self.rng.gen_bool(0.3);
        let mut locals = Vec::with_capacity(count);
        for i in 0..count {
            let sub = if cover && i == 0 {
                Subgroup::whole(gamma)
            } else {
                subgroups.choose(&mut self.rng).expect("trivial subgroup").clone()
            };
            let (h, inclusion) = sub.to_group();
            let g = self.rng.gen_range(0..gamma.order());
            let theta = GroupHom::inner(gamma, g).compose(&inclusion).expect("into Γ");
            let e = ext.e();
            let mode = self.rng.gen_range(0..3);
            let section = match mode {
                0 if !sections.is_empty() => {
                    let s = sections.choose(&mut self.rng).expect("nonempty");
                    let a = *ext.a_in_e().elements().choose(&mut self.rng).expect("nonempty");
                    s.compose(&inclusion).expect("composable").conjugated_by(s.apply(g)).conjugated_by(a)
                }
                1 => {
                    let u = homs.choose(&mut self.rng).expect("trivial hom");
                    let c = self.rng.gen_range(0..e.order());
                    u.compose(&inclusion).expect("composable").conjugated_by(c)
                }
                _ => {
                    let lifts: Vec<GroupHom> = group::enumerate_homs(&h, e)
                        .into_iter()
                        .filter(|s| ext.pi().compose(s).expect("into E") == theta)
                        .collect();
                    match lifts.choose(&mut self.rng) {
                        Some(s) => s.clone(),
                        None => GroupHom::trivial(&h, e),
                    }
                }
            };
            locals.push(section);
        }
        LocalSections::new(ext, locals).expect("local sections into E")
    }

    /// A random family over a random catalog group that covers it by
    /// conjugates, with a random subgroup.
    pub fn dense_pair(&mut self) -> (LocalFamily, Subgroup) {
        loop {
            let gamma = self.bases.choose(&mut self.rng).expect("catalog nonempty").clone();
            let subgroups = group::all_subgroups(&gamma);
            let count = self.rng.gen_range(1..=MAX_LOCALS);
            let thetas: Vec<GroupHom> = (0..count)
                .map(|_| {
                    let sub = subgroups.choose(&mut self.rng).expect("nonempty");
                    let g = self.rng.gen_range(0..gamma.order());
                    GroupHom::inner(&gamma, g).compose(&sub.to_group().1).expect("into Γ")
                })
                .collect();
            let family = LocalFamily::new(&gamma, thetas).expect("maps into Γ");
            if check_density(&family) {
                let sub = subgroups.choose(&mut self.rng).expect("nonempty").clone();
                return (family, sub);
            }
        }
    }

    /// A tower `E/U_0 <- E/U_1 <- E` for a random extension with a random
    /// chain `A ⊇ U_0 ⊇ U_1` of subgroups normal in `E`, with random local
    /// sections at the top.
    pub fn tower(&mut self) -> (Tower, Vec<GroupHom>) {
        let ext = self.extension();
        let normals = group::normal_subgroups_within(ext.a_in_e());
        let u0 = normals.choose(&mut self.rng).expect("A itself").clone();
        let below: Vec<&Subgroup> = normals.iter().filter(|v| v.is_subset_of(&u0)).collect();
        let u1 = (*below.choose(&mut self.rng).expect("trivial subgroup")).clone();
        let tower = Tower::from_chain(&ext, &[u0, u1]).expect("decreasing chain");
        let ls = self.local_sections_for(&ext);
        (tower, ls.sections().to_vec())
    }
}

/// `count` seeded instances over extensions with `|E| ≤ max_order`.
pub fn instances(seed: u64, count: usize, max_order: usize) -> Vec<LocalSections> {
    let mut gen = InstanceGenerator::new(seed, max_order);
    (0..count).map(|_| gen.local_sections()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = instances(7, 20, 12);
        let b = instances(7, 20, 12);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.sections(), y.sections());
            assert_eq!(x.ext().e().table_rows(), y.ext().e().table_rows());
        }
    }

    #[test]
    fn shapes() {
        for ls in instances(3, 30, 24) {
            assert!(ls.sections().len() <= MAX_LOCALS);
            assert!(ls.ext().e().order() <= 24);
        }
        let mut gen = InstanceGenerator::new(1, 12);
        let (family, sub) = gen.dense_pair();
        assert!(check_density(&family));
        assert!(std::sync::Arc::ptr_eq(sub.parent(), family.gamma()));
        let (tower, top) = gen.tower();
        assert_eq!(tower.levels().len(), 3);
        assert!(LocalSections::new(tower.top(), top).is_ok());
    }
}
