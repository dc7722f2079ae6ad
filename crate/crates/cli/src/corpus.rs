//! Deterministic corpus manifests: preset groups plus seeded random
//! extensions with local sections, and jobs exercising every command.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use thiserror::Error;

use seclab_core::group::{self, GroupHom, GroupRef, Subgroup};
use seclab_core::instances::InstanceGenerator;
use seclab_core::presets;

use crate::gxf::{parse_manifest, Manifest, ManifestError};

pub const MAX_CORPUS_ORDER: usize = 64;
/// Extensions in generated corpora are drawn from groups up to this order.
pub const MAX_EXTENSION_ORDER: usize = 24;
const RANDOM_EXTENSIONS: usize = 4;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("max order {0} is outside 1..={MAX_CORPUS_ORDER}")]
    BoundExceeded(usize),
    #[error("generated manifest failed to parse: {0}")]
    Invalid(#[from] ManifestError),
}

fn ident(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '^' { c } else { '_' }).collect::<String>()
        .trim_end_matches('_')
        .to_string()
}

fn list(xs: impl IntoIterator<Item = usize>) -> String {
    format!("[{}]", xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn table(g: &GroupRef) -> String {
    format!("[{}]", g.table_rows().into_iter().map(list).collect::<Vec<_>>().join(", "))
}

fn gens_of(sub: &Subgroup) -> Vec<usize> {
    let (h, inclusion) = sub.to_group();
    h.generators().iter().map(|&x| inclusion.apply(x)).collect()
}

fn hom_line(out: &mut String, name: &str, src: &str, tgt: &str, h: &GroupHom) {
    let _ = writeln!(out, "hom {name} {src} {tgt} {}", list(h.map().iter().copied()));
}

/// Manifest text for [`generate_corpus`].
pub fn generate_corpus_text(max_order: usize, seed: u64) -> Result<String, CorpusError> {
    if max_order == 0 || max_order > MAX_CORPUS_ORDER {
        return Err(CorpusError::BoundExceeded(max_order));
    }
    let mut out = String::new();
    let _ = writeln!(out, "# corpus: max_order={max_order} seed={seed}");
    let mut gen = InstanceGenerator::new(seed, max_order.min(MAX_EXTENSION_ORDER));

    let catalog = presets::catalog(max_order);
    for g in &catalog {
        let label = g.label().expect("catalog groups are labelled");
        let _ = writeln!(out, "group {} preset {label}", ident(label));
    }
    if max_order >= 6 {
        let _ = writeln!(out, "group S3_perm perm 3 [(0 1), (0 1 2)]");
    }
    if max_order >= 24 {
        let _ = writeln!(out, "group S4_perm perm 4 [(0 1), (0 1 2 3)]");
    }
    for g in catalog.iter().filter(|g| g.order() > 1) {
        let subs: Vec<Subgroup> = group::all_subgroups(g).into_iter().filter(|s| s.order() < g.order()).collect();
        let sub = subs.choose(gen.rng()).expect("trivial subgroup is proper");
        let _ = writeln!(out, "job jordan {} sub={}", ident(g.label().expect("labelled")), list(gens_of(sub)));
    }

    if max_order >= 6 {
        out.push_str(
            "\n# C2 acting on C3 by inversion\n\
             action C2_on_C3 C2 C3 table [[0, 1, 2], [0, 2, 1]]\n\
             job h1 C2_on_C3\n",
        );
    }
    if max_order >= 4 {
        out.push_str(
            "\n# C4 over C2, with no sections\n\
             hom Z4_iota C2 C4 [2]\n\
             hom Z4_pi C4 C2 [1]\n\
             extension Z4 C2 C4 C2 Z4_iota Z4_pi\n\
             hom Z4_t C1 C2 [0]\n\
             hom Z4_s C1 C4 [0]\n\
             family Z4_F C2 { local C1 Z4_t }\n\
             sections Z4_L Z4 { Z4_s }\n\
             job sections Z4\n\
             job verify Z4_L\n\
             job decide Z4_L prop=b\n\
             job density Z4_F\n",
        );
    }

    if !gen.extensions().is_empty() {
        for k in 0..RANDOM_EXTENSIONS {
            let ls = gen.local_sections();
            let ext = ls.ext();
            let x = format!("X{k}");
            let _ = writeln!(out, "\n# random extension {k}");
            let _ = writeln!(out, "group {x}_A table {}", table(ext.a()));
            let _ = writeln!(out, "group {x}_E table {}", table(ext.e()));
            let _ = writeln!(out, "group {x}_G table {}", table(ext.gamma()));
            hom_line(&mut out, &format!("{x}_iota"), &format!("{x}_A"), &format!("{x}_E"), ext.iota());
            hom_line(&mut out, &format!("{x}_pi"), &format!("{x}_E"), &format!("{x}_G"), ext.pi());
            let _ = writeln!(out, "extension {x} {x}_A {x}_E {x}_G {x}_iota {x}_pi");
            let mut locals = Vec::new();
            let mut sections = Vec::new();
            for (i, (s, theta)) in ls.sections().iter().zip(ls.family().thetas()).enumerate() {
                let h = format!("{x}_H{i}");
                let _ = writeln!(out, "group {h} table {}", table(s.source()));
                hom_line(&mut out, &format!("{x}_s{i}"), &h, &format!("{x}_E"), s);
                hom_line(&mut out, &format!("{x}_t{i}"), &h, &format!("{x}_G"), theta);
                locals.push(format!("local {h} {x}_t{i}"));
                sections.push(format!("{x}_s{i}"));
            }
            let _ = writeln!(out, "family {x}_F {x}_G {{ {} }}", locals.join("; "));
            let _ = writeln!(out, "sections {x}_L {x} {{ {} }}", sections.join(" "));
            let _ = writeln!(out, "job sections {x}");
            let _ = writeln!(out, "job verify {x}_L");
            for prop in ["a", "a'", "a''", "b", "c"] {
                let _ = writeln!(out, "job decide {x}_L prop={prop}");
            }
            let _ = writeln!(out, "job density {x}_F");
            let _ = writeln!(out, "job tower {x}_L chain={}", list(ext.a().generators().iter().copied()));
            let _ = writeln!(out, "job transport {x}_F sub={}", list(gens_of(&Subgroup::trivial(ext.gamma()))));
            if let Some(s0) = ext.first_section() {
                let e = ext.e();
                let back = |y: usize| ext.a().elements().find(|&x| ext.iota().apply(x) == y).expect("A is normal");
                let rows: Vec<Vec<usize>> = ext
                    .gamma()
                    .elements()
                    .map(|g| ext.a().elements().map(|x| back(e.conjugate(s0.apply(g), ext.iota().apply(x)))).collect())
                    .collect();
                let _ = writeln!(out, "action {x}_M {x}_G {x}_A table {}", list_rows(&rows));
                let _ = writeln!(out, "job h1 {x}_M");
                let _ = writeln!(out, "job fibre {x}_F action={x}_M alpha=0");
            }
        }
        let _ = writeln!(out, "\njob verify random count=10");
    }
    Ok(out)
}

fn list_rows(rows: &[Vec<usize>]) -> String {
    format!("[{}]", rows.iter().map(|r| list(r.iter().copied())).collect::<Vec<_>>().join(", "))
}

/// A validated corpus manifest; the same arguments give the same manifest.
pub fn generate_corpus(max_order: usize, seed: u64) -> Result<Manifest, CorpusError> {
    Ok(parse_manifest(&generate_corpus_text(max_order, seed)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gxf::{serialize, Item};

    #[test]
    fn bounds() {
        assert!(matches!(generate_corpus(65, 1), Err(CorpusError::BoundExceeded(65))));
        assert!(matches!(generate_corpus(0, 1), Err(CorpusError::BoundExceeded(0))));
    }

    #[test]
    fn order_one_is_only_the_trivial_group() {
        let m = generate_corpus(1, 1).unwrap();
        let groups: Vec<&String> =
            m.items().iter().filter(|(_, i)| matches!(i, Item::Group(_))).map(|(n, _)| n).collect();
        assert_eq!(groups, ["C1"]);
        assert!(m.items().len() == 1);
    }

    #[test]
    fn small_corpus_contents() {
        let m = generate_corpus(8, 1).unwrap();
        for name in ["C2", "C3", "C4", "V4", "C5", "S3", "C6", "C7", "C8", "D4", "Q8", "C2^3", "C2xC4"] {
            assert!(m.group(name).is_some(), "{name}");
        }
        assert!(m.extension("Z4").is_some());
        let same = generate_corpus_text(8, 1).unwrap();
        assert_eq!(same, generate_corpus_text(8, 1).unwrap());
        assert_ne!(same, generate_corpus_text(8, 2).unwrap());
        assert_eq!(serialize(&parse_manifest(&serialize(&m)).unwrap()), serialize(&m));
    }
}
