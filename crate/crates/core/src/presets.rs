//! Small groups, automorphism groups, action catalogs and a few standard
//! extensions.

use std::sync::Arc;

use crate::cohomology::{CoeffRef, GammaGroup};
use crate::extension::{self, Extension};
use crate::group::{self, FiniteGroup, GroupHom, GroupRef, Subgroup, DEFAULT_CLOSURE_BOUND};

/// A permutation group: the abstract group with the permutation of each
/// element.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub group: GroupRef,
    pub perms: Vec<Vec<usize>>,
}

impl PermGroup {
    pub fn generated(degree: usize, gens: &[Vec<usize>], label: impl Into<String>) -> Self {
        let (g, perms) = FiniteGroup::from_permutations(degree, gens, DEFAULT_CLOSURE_BOUND)
            .expect("preset generators are permutations of a small group");
        PermGroup { group: Arc::new(g.with_label(label)), perms }
    }

    /// Index of the element acting as `perm`.
    ///
    /// # Panics
    /// If `perm` is not in the group.
    pub fn element(&self, perm: &[usize]) -> usize {
        self.perms.iter().position(|p| p == perm).expect("permutation not in group")
    }

    pub fn degree(&self) -> usize {
        self.perms[0].len()
    }
}

fn labelled(table: Vec<Vec<usize>>, label: String) -> GroupRef {
    Arc::new(FiniteGroup::from_table(table).expect("preset table is a group").with_label(label))
}

fn relabel(g: &GroupRef, label: String) -> GroupRef {
    Arc::new((**g).clone().with_label(label))
}

pub fn cyclic(n: usize) -> GroupRef {
    assert!(n >= 1);
    labelled((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(), format!("C{n}"))
}

/// The dihedral group of order `2n`.
pub fn dihedral(n: usize) -> GroupRef {
    assert!(n >= 1);
    // r^a s^j with s r s = r^-1; index a + n*j
    let size = 2 * n;
    let table = (0..size)
        .map(|x| {
            let (a, j) = (x % n, x / n);
            (0..size)
                .map(|y| {
                    let (b, k) = (y % n, y / n);
                    let b = if j == 1 { (n - b) % n } else { b };
                    (a + b) % n + n * ((j + k) % 2)
                })
                .collect()
        })
        .collect();
    labelled(table, format!("D{n}"))
}

/// Dicyclic group of order `4n`: `a^k x^j`, `x^2 = a^n`, `x a x^-1 = a^-1`.
/// `dicyclic(2)` is the quaternion group.
pub fn dicyclic(n: usize) -> GroupRef {
    assert!(n >= 1);
    let m = 2 * n;
    let size = 2 * m;
    let table = (0..size)
        .map(|x| {
            let (a, j) = (x % m, x / m);
            (0..size)
                .map(|y| {
                    let (b, k) = (y % m, y / m);
                    // a^a x^j a^b x^k = a^(a ± b) x^j x^k
                    let b = if j == 1 { (m - b) % m } else { b };
                    let mut exp = (a + b) % m;
                    let mut t = j + k;
                    if t == 2 {
                        exp = (exp + n) % m;
                        t = 0;
                    }
                    exp + m * t
                })
                .collect()
        })
        .collect();
    let label = if n == 2 { "Q8".to_string() } else { format!("Dic{n}") };
    labelled(table, label)
}

pub fn quaternion() -> GroupRef {
    dicyclic(2)
}

pub fn klein() -> GroupRef {
    relabel(&group::direct_product(&cyclic(2), &cyclic(2)), "V4".into())
}

/// `(C_p)^k`.
pub fn elementary_abelian(p: usize, k: usize) -> GroupRef {
    let mut g = cyclic(1);
    for _ in 0..k {
        g = group::direct_product(&g, &cyclic(p));
    }
    relabel(&g, format!("C{p}^{k}"))
}

pub fn product(g: &GroupRef, h: &GroupRef) -> GroupRef {
    let label = format!("{}x{}", g.label().unwrap_or("G"), h.label().unwrap_or("H"));
    relabel(&group::direct_product(g, h), label)
}

/// The symmetric group on `n` points as a permutation group.
pub fn symmetric_perm(n: usize) -> PermGroup {
    assert!(n >= 1);
    let mut gens = Vec::new();
    if n >= 2 {
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        gens.push(swap);
    }
    if n >= 3 {
        gens.push((0..n).map(|i| (i + 1) % n).collect());
    }
    PermGroup::generated(n, &gens, format!("S{n}"))
}

pub fn symmetric(n: usize) -> GroupRef {
    symmetric_perm(n).group
}

/// The alternating group on `n` points, generated by the 3-cycles `(0 1 i)`.
pub fn alternating_perm(n: usize) -> PermGroup {
    assert!(n >= 1);
    let gens: Vec<Vec<usize>> = (2..n)
        .map(|i| {
            let mut p: Vec<usize> = (0..n).collect();
            p[0] = 1;
            p[1] = i;
            p[i] = 0;
            p
        })
        .collect();
    PermGroup::generated(n, &gens, format!("A{n}"))
}

pub fn alternating(n: usize) -> GroupRef {
    alternating_perm(n).group
}

/// `SL(2, 3)` acting on the eight nonzero vectors of `F_3^2`.
pub fn sl23() -> GroupRef {
    let vectors: Vec<(usize, usize)> =
        (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).filter(|&v| v != (0, 0)).collect();
    let perm_of = |m: [[usize; 2]; 2]| -> Vec<usize> {
        vectors
            .iter()
            .map(|&(x, y)| {
                let image = ((m[0][0] * x + m[0][1] * y) % 3, (m[1][0] * x + m[1][1] * y) % 3);
                vectors.iter().position(|&v| v == image).expect("nonzero image")
            })
            .collect()
    };
    PermGroup::generated(8, &[perm_of([[1, 1], [0, 1]]), perm_of([[1, 0], [1, 1]])], "SL(2,3)").group
}

/// Named groups of order at most `max_order`, ordered by order: every group
/// of order at most 15, a selection of orders 16 to 24, and cyclic,
/// dihedral, dicyclic and `C2 x C_k` groups beyond.
pub fn catalog(max_order: usize) -> Vec<GroupRef> {
    let mut out: Vec<GroupRef> = Vec::new();
    let mut push = |g: GroupRef| {
        if g.order() <= max_order {
            out.push(g);
        }
    };
    let c = cyclic;
    for n in 1..=max_order.min(64) {
        push(c(n));
        match n {
            4 => push(klein()),
            6 => push(symmetric(3)),
            8 => {
                push(product(&c(2), &c(4)));
                push(elementary_abelian(2, 3));
                push(dihedral(4));
                push(quaternion());
            }
            9 => push(elementary_abelian(3, 2)),
            10 => push(dihedral(5)),
            12 => {
                push(product(&c(2), &c(6)));
                push(dihedral(6));
                push(alternating(4));
                push(dicyclic(3));
            }
            14 => push(dihedral(7)),
            16 => {
                push(product(&c(4), &c(4)));
                push(product(&c(2), &c(8)));
                push(product(&klein(), &c(4)));
                push(elementary_abelian(2, 4));
                push(dihedral(8));
                push(dicyclic(4));
                push(product(&c(2), &dihedral(4)));
                push(product(&c(2), &quaternion()));
            }
            18 => {
                push(product(&c(3), &c(6)));
                push(dihedral(9));
                push(product(&c(3), &symmetric(3)));
            }
            20 => {
                push(product(&c(2), &c(10)));
                push(dihedral(10));
                push(dicyclic(5));
            }
            22 => push(dihedral(11)),
            24 => {
                push(symmetric(4));
                push(sl23());
                push(dihedral(12));
                push(dicyclic(6));
                push(product(&c(2), &alternating(4)));
                push(product(&c(2), &c(12)));
                push(product(&c(4), &symmetric(3)));
                push(product(&c(3), &dihedral(4)));
                push(product(&c(3), &quaternion()));
            }
            _ if n > 24 => {
                if n % 2 == 0 {
                    push(dihedral(n / 2));
                }
                if n % 4 == 0 {
                    push(product(&c(2), &c(n / 2)));
                    push(dicyclic(n / 4));
                }
            }
            _ => {}
        }
    }
    out
}

/// Looks a group up by name: `C<n>`, `D<n>` (order `2n`), `Dic<n>`, `S<n>`,
/// `A<n>` (`n ≤ 6`), `Q8`, `V4`, `SL(2,3)`, `C<p>^<k>`, and products `GxH`.
pub fn by_name(name: &str) -> Option<GroupRef> {
    if let Some((left, right)) = name.split_once('x') {
        return Some(product(&by_name(left)?, &by_name(right)?));
    }
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok()).filter(|&n| n >= 1);
    match name {
        "Q8" => return Some(quaternion()),
        "V4" => return Some(klein()),
        "SL(2,3)" => return Some(sl23()),
        _ => {}
    }
    if let Some((base, k)) = name.split_once('^') {
        let p = base.strip_prefix('C')?.parse::<usize>().ok().filter(|&p| p >= 2)?;
        let k = k.parse::<usize>().ok().filter(|&k| (1..=6).contains(&k))?;
        return Some(elementary_abelian(p, k));
    }
    if let Some(n) = num("Dic") {
        return Some(dicyclic(n));
    }
    if let Some(n) = num("C") {
        return Some(cyclic(n));
    }
    if let Some(n) = num("D") {
        return Some(dihedral(n));
    }
    if let Some(n) = num("S").filter(|&n| n <= 6) {
        return Some(symmetric(n));
    }
    if let Some(n) = num("A").filter(|&n| n <= 6) {
        return Some(alternating(n));
    }
    None
}

/// `Aut(M)` as a permutation group on the elements of `M`.
pub fn automorphism_group(m: &GroupRef) -> PermGroup {
    let autos: Vec<Vec<usize>> = group::enumerate_homs(m, m)
        .into_iter()
        .filter(GroupHom::is_bijective)
        .map(|h| h.map().to_vec())
        .collect();
    PermGroup::generated(m.order(), &autos, format!("Aut({})", m.label().unwrap_or("M")))
}

/// Actions of `Γ` on `M` up to conjugation by `Aut(M)`, trivial action first.
pub fn actions(gamma: &GroupRef, m: &GroupRef) -> Vec<CoeffRef> {
    let aut = automorphism_group(m);
    let homs = group::enumerate_homs(gamma, &aut.group);
    let all: Vec<usize> = aut.group.elements().collect();
    extension::partition_by_conjugation(&homs, &all)
        .iter()
        .map(|class| {
            let coeff = GammaGroup::from_permutation_representation(gamma, m, &homs[class[0]], &aut.perms)
                .expect("hom into Aut(M) is an action");
            Arc::new(coeff)
        })
        .collect()
}

/// `1 -> C3 -> S3 -> C2 -> 1`.
pub fn s3_over_c2() -> Extension {
    let s3 = symmetric(3);
    let a3 = group::normal_subgroups(&s3).into_iter().find(|n| n.order() == 3).expect("A3");
    Extension::from_normal_subgroup(&a3).expect("A3 is normal")
}

/// `1 -> C2 -> C4 -> C2 -> 1`, which does not split.
pub fn c4_over_c2() -> Extension {
    let c4 = cyclic(4);
    Extension::from_normal_subgroup(&Subgroup::new(&c4, [0, 2]).expect("subgroup")).expect("normal")
}

/// All extensions `1 -> N -> E -> E/N -> 1` with `E` in the catalog up to
/// `max_order` and `N` a nontrivial proper normal subgroup.
pub fn extension_corpus(max_order: usize) -> Vec<Extension> {
    catalog(max_order)
        .iter()
        .flat_map(|e| {
            group::normal_subgroups(e)
                .into_iter()
                .filter(|n| n.order() > 1 && n.order() < e.order())
                .map(|n| Extension::from_normal_subgroup(&n).expect("normal subgroup"))
                .collect::<Vec<_>>()
        })
        .collect()
}
