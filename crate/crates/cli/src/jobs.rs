//! Running manifest jobs.

use std::time::Instant;

use serde_json::{json, Value};

use seclab_core::cohomology::{self, Cocycle};
use seclab_core::extension::{self, Extension};
use seclab_core::group::{self, GroupHom, GroupRef, Subgroup};
use seclab_core::instances::InstanceGenerator;
use seclab_core::localglobal::{
    self, CoefficientCorpus, DescentVerdict, Interpolation, LocalFamily, LocalSections, Tower,
};

use crate::gxf::{Item, Job, Manifest, OptValue};
use crate::report::{JobStatus, Report};

/// Settings shared by all jobs of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    /// Order bound for generated instances.
    pub max_order: usize,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, max_order: 24, timing: true }
    }
}

pub const COMMANDS: &[&str] =
    &["sections", "h1", "pushout", "decide", "density", "fibre", "jordan", "verify", "tower", "transport"];

type JobResult = Result<(), String>;

pub fn run_all(manifest: &Manifest, config: &RunConfig) -> Vec<Report> {
    manifest.jobs.iter().enumerate().map(|(i, job)| run_job(manifest, job, i + 1, config)).collect()
}

pub fn run_job(manifest: &Manifest, job: &Job, index: usize, config: &RunConfig) -> Report {
    let mut report = Report::new(index, job.to_string());
    let start = Instant::now();
    let outcome = match job.command.as_str() {
        "sections" => job_sections(manifest, job, &mut report),
        "h1" => job_h1(manifest, job, &mut report),
        "pushout" => job_pushout(manifest, job, &mut report),
        "decide" => job_decide(manifest, job, &mut report),
        "density" => job_density(manifest, job, &mut report),
        "fibre" => job_fibre(manifest, job, &mut report),
        "jordan" => job_jordan(manifest, job, &mut report),
        "verify" => job_verify(manifest, job, config, &mut report),
        "tower" => job_tower(manifest, job, &mut report),
        "transport" => job_transport(manifest, job, &mut report),
        other => Err(format!("unknown command `{other}` (expected one of {})", COMMANDS.join(", "))),
    };
    if let Err(msg) = outcome {
        report.status = JobStatus::Error(format!("{}: {msg}", job.pos));
    }
    if config.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis());
    }
    report
}

// ---- target and option lookup

fn wrong_kind(job: &Job, manifest: &Manifest, want: &str) -> String {
    match manifest.get(&job.target) {
        Some(item) => format!("`{}` is a {}, expected {want}", job.target, item.kind()),
        None => format!("unknown target `{}`", job.target),
    }
}

fn target_extension<'m>(manifest: &'m Manifest, job: &Job) -> Result<&'m Extension, String> {
    manifest.extension(&job.target).map(|x| &x.ext).ok_or_else(|| wrong_kind(job, manifest, "an extension"))
}

fn target_sections<'m>(manifest: &'m Manifest, job: &Job) -> Result<&'m LocalSections, String> {
    manifest.sections(&job.target).map(|s| &s.data).ok_or_else(|| wrong_kind(job, manifest, "local sections"))
}

fn target_family<'m>(manifest: &'m Manifest, job: &Job) -> Result<&'m LocalFamily, String> {
    match manifest.get(&job.target) {
        Some(Item::Family(f)) => Ok(&f.family),
        Some(Item::Sections(s)) => Ok(s.data.family()),
        _ => Err(wrong_kind(job, manifest, "a family or local sections")),
    }
}

fn opt_usize(job: &Job, key: &str) -> Result<Option<usize>, String> {
    match job.option(key) {
        None => Ok(None),
        Some(OptValue::Num(n)) => Ok(Some(*n)),
        Some(v) => Err(format!("option `{key}` expects a number, got `{v}`")),
    }
}

fn opt_list(job: &Job, key: &str) -> Result<Option<Vec<usize>>, String> {
    match job.option(key) {
        None => Ok(None),
        Some(OptValue::List(xs)) => Ok(Some(xs.clone())),
        Some(OptValue::Num(n)) => Ok(Some(vec![*n])),
        Some(v) => Err(format!("option `{key}` expects a list, got `{v}`")),
    }
}

fn opt_idents(job: &Job, key: &str) -> Result<Vec<String>, String> {
    match job.option(key) {
        None => Ok(Vec::new()),
        Some(OptValue::Ident(s)) => Ok(vec![s.clone()]),
        Some(OptValue::Alt(vs)) => vs
            .iter()
            .map(|v| match v {
                OptValue::Ident(s) => Ok(s.clone()),
                other => Err(format!("option `{key}` expects names, got `{other}`")),
            })
            .collect(),
        Some(v) => Err(format!("option `{key}` expects names, got `{v}`")),
    }
}

/// Subgroup generated by the listed elements.
fn generated(group: &GroupRef, gens: &[usize]) -> Result<Subgroup, String> {
    Subgroup::generated(group, gens).map_err(|e| e.to_string())
}

fn subgroup_option(job: &Job, group: &GroupRef) -> Result<Subgroup, String> {
    let gens = opt_list(job, "sub")?.ok_or("missing option `sub=[generators]`")?;
    generated(group, &gens)
}

fn hom_json(h: &GroupHom) -> Value {
    json!(h.map())
}

fn interpolation_json(w: &Interpolation) -> Value {
    json!({ "map": w.hom.map(), "conjugators": w.conjugators })
}

fn verdict_json(report: &mut Report, verdict: &DescentVerdict) {
    report.put("holds", verdict.holds);
    report.put("classes_checked", verdict.classes_checked);
    if let Some(w) = &verdict.witness {
        report.put("failing_entry", w.entry);
        report.put("failing_coefficients", w.label.clone());
        report.put("failing_class", json!(w.class.values()));
    }
}

// ---- commands

fn job_sections(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let ext = target_extension(manifest, job)?;
    let sections = extension::enumerate_sections(ext);
    report.put("a_order", ext.a().order());
    report.put("e_order", ext.e().order());
    report.put("gamma_order", ext.gamma().order());
    report.put("sections", sections.sections.len());
    report.put("split", !sections.sections.is_empty());
    report.put("classes_mod_a", sections.classes_mod_a.len());
    report.put("classes_mod_e", sections.classes_mod_e.len());
    report.put("first_section", sections.sections.first().map_or(Value::Null, hom_json));
    Ok(())
}

fn job_h1(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let action = manifest.action(&job.target).ok_or_else(|| wrong_kind(job, manifest, "an action"))?;
    let h1 = cohomology::h1(&action.coeff);
    report.put("gamma_order", action.coeff.gamma().order());
    report.put("m_order", action.coeff.m().order());
    report.put("constant", action.coeff.is_constant());
    report.put("cocycles", h1.cocycles.len());
    report.put("classes", h1.len());
    let reps: Vec<Value> = h1.representatives.iter().map(|r| json!(r.values())).collect();
    report.put("representatives", reps);
    Ok(())
}

fn a_subgroup(ext: &Extension, gens: &[usize]) -> Result<Subgroup, String> {
    generated(ext.a(), gens)
}

fn job_pushout(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let ext = target_extension(manifest, job)?;
    let gens = opt_list(job, "sub")?.ok_or("missing option `sub=[generators of A]`")?;
    let u = a_subgroup(ext, &gens)?;
    let (bar, _) = extension::pushout(ext, &u).map_err(|e| e.to_string())?;
    let sections = extension::enumerate_sections(&bar);
    report.put("u_order", u.order());
    report.put("a_order", bar.a().order());
    report.put("e_order", bar.e().order());
    report.put("sections", sections.sections.len());
    report.put("split", !sections.sections.is_empty());
    report.put("classes_mod_a", sections.classes_mod_a.len());
    Ok(())
}

fn job_decide(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let ls = target_sections(manifest, job)?;
    let prop = match job.option("prop") {
        Some(OptValue::Ident(p)) => p.clone(),
        _ => return Err("missing option `prop=a|a'|a''|b|c`".into()),
    };
    report.put("property", prop.clone());
    match prop.as_str() {
        "a" => {
            let mut corpus = CoefficientCorpus::default_for(ls.ext());
            for name in opt_idents(job, "extra")? {
                let action = manifest.action(&name).ok_or(format!("unknown action `{name}`"))?;
                if !group::same_group(action.coeff.gamma(), ls.ext().gamma()) {
                    return Err(format!("action `{name}` is not over the base group"));
                }
                corpus.push_user(action.coeff.clone(), name);
            }
            report.put("corpus_entries", corpus.len());
            verdict_json(report, &localglobal::decide_a(ls, &corpus));
        }
        "a'" => {
            let bound = opt_usize(job, "bound")?.unwrap_or(ls.ext().e().order());
            report.put("bound", bound);
            verdict_json(report, &localglobal::decide_a_prime(ls, bound));
        }
        "a''" => verdict_json(report, &localglobal::decide_a_doubleprime(ls)),
        "b" | "c" => {
            let witness = if prop == "b" { localglobal::decide_b(ls) } else { localglobal::decide_c(ls) };
            report.put("holds", witness.is_some());
            report.put("witness", witness.as_ref().map_or(Value::Null, interpolation_json));
        }
        other => return Err(format!("unknown property `{other}`")),
    }
    Ok(())
}

fn job_density(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let family = target_family(manifest, job)?;
    let mut covered = vec![false; family.gamma().order()];
    for theta in family.thetas() {
        for x in group::union_of_conjugates(&theta.image()).union {
            covered[x] = true;
        }
    }
    report.put("locals", family.len());
    report.put("gamma_order", family.gamma().order());
    report.put("union", covered.iter().filter(|&&b| b).count());
    report.put("dense", localglobal::check_density(family));
    Ok(())
}

fn job_fibre(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let family = target_family(manifest, job)?;
    let name = match job.option("action") {
        Some(OptValue::Ident(a)) => a.clone(),
        _ => return Err("missing option `action=NAME`".into()),
    };
    let action = manifest.action(&name).ok_or(format!("unknown action `{name}`"))?;
    if !group::same_group(action.coeff.gamma(), family.gamma()) {
        return Err(format!("action `{name}` is not over the family's group"));
    }
    let reps = cohomology::h1_representatives(&action.coeff);
    let k = opt_usize(job, "alpha")?.unwrap_or(0);
    let alpha: &Cocycle = reps.get(k).ok_or(format!("class index {k} out of range (H^1 has {})", reps.len()))?;
    let fibre = localglobal::diagonal_fibre(alpha, family);
    let indices: Vec<usize> = fibre
        .iter()
        .map(|b| reps.iter().position(|r| r.values() == b.values()).expect("fibre classes are representatives"))
        .collect();
    report.put("h1_classes", reps.len());
    report.put("alpha", json!(alpha.values()));
    report.put("fibre_size", indices.len());
    report.put("fibre", json!(indices));
    Ok(())
}

fn job_jordan(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let g = manifest.group(&job.target).ok_or_else(|| wrong_kind(job, manifest, "a group"))?;
    let h = subgroup_option(job, &g.group)?;
    let j = group::union_of_conjugates(&h);
    report.put("subgroup_order", h.order());
    report.put("index", j.index);
    report.put("covers", j.covers);
    report.put("bound", j.bound);
    report.put("union", j.union_size());
    report.put("respects_bound", j.respects_bound());
    Ok(())
}

fn put_equivalences(report: &mut Report, ls: &LocalSections) -> bool {
    let eq = localglobal::verify_equivalences(ls);
    report.put("a", eq.a);
    report.put("a'", eq.a_prime);
    report.put("a''", eq.a_doubleprime);
    report.put("b", eq.b);
    report.put("c", eq.c);
    report.put("dense", eq.star_star);
    report.put("split", eq.split);
    report.put("b_witness", eq.b_witness.as_ref().map_or(Value::Null, interpolation_json));
    report.put("c_witness", eq.c_witness.as_ref().map_or(Value::Null, interpolation_json));
    if let Some(s) = &eq.section_from_b {
        report.put("constructed_section", interpolation_json(&s.interpolation));
        report.put("constructed_conjugators_in_a", s.conjugators_in_a);
    }
    let checked: Vec<Value> = eq
        .implications
        .iter()
        .filter(|c| c.applicable)
        .map(|c| json!(format!("{}: {}", c.name, if c.holds { "ok" } else { "VIOLATED" })))
        .collect();
    report.put("implications", checked);
    let violations = eq.violations();
    report.put("violations", violations.len());
    violations.is_empty()
}

fn job_verify(manifest: &Manifest, job: &Job, config: &RunConfig, report: &mut Report) -> JobResult {
    if job.target != "random" {
        let ls = target_sections(manifest, job)?;
        if !put_equivalences(report, ls) {
            report.status = JobStatus::EquivalenceFailed;
        }
        return Ok(());
    }
    let count = opt_usize(job, "count")?.unwrap_or(20);
    let max_order = opt_usize(job, "max_order")?.unwrap_or(config.max_order).min(config.max_order);
    let seed = opt_usize(job, "seed")?.map_or(config.seed, |s| s as u64);
    let mut gen = InstanceGenerator::new(seed, max_order);
    if gen.extensions().is_empty() {
        return Err(format!("no extensions with |E| <= {max_order}"));
    }
    let mut tally = [0usize; 6];
    let mut failing = Vec::new();
    for k in 0..count {
        let ls = gen.local_sections();
        let eq = localglobal::verify_equivalences(&ls);
        for (slot, flag) in [eq.a, eq.a_prime, eq.a_doubleprime, eq.b, eq.c, eq.star_star].into_iter().enumerate() {
            tally[slot] += usize::from(flag);
        }
        if !eq.is_consistent() {
            failing.push(json!({ "instance": k, "violations": eq.violations() }));
        }
    }
    report.put("seed", seed);
    report.put("max_order", max_order);
    report.put("instances", count);
    for (name, n) in ["a", "a'", "a''", "b", "c", "dense"].iter().zip(tally) {
        report.put(&format!("count_{name}"), n);
    }
    report.put("violations", failing.len());
    if !failing.is_empty() {
        report.put("failing", failing);
        report.status = JobStatus::EquivalenceFailed;
    }
    Ok(())
}

fn job_tower(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let ls = target_sections(manifest, job)?;
    let ext = ls.ext();
    let chain: Vec<Vec<usize>> = match job.option("chain") {
        None => Vec::new(),
        Some(OptValue::List(xs)) => vec![xs.clone()],
        Some(OptValue::Alt(vs)) => vs
            .iter()
            .map(|v| match v {
                OptValue::List(xs) => Ok(xs.clone()),
                other => Err(format!("chain entries are generator lists, got `{other}`")),
            })
            .collect::<Result<_, _>>()?,
        Some(v) => return Err(format!("option `chain` expects lists, got `{v}`")),
    };
    let subs = chain.iter().map(|gens| a_subgroup(ext, gens)).collect::<Result<Vec<_>, _>>()?;
    let tower = Tower::from_chain(ext, &subs).map_err(|e| e.to_string())?;
    let outcome = localglobal::tower_limit_sections(&tower, ls.sections()).map_err(|e| e.to_string())?;
    report.put("levels", tower.levels().len());
    report.put("level_orders", json!(tower.levels().iter().map(|l| l.e().order()).collect::<Vec<_>>()));
    report.put("level_sizes", json!(outcome.level_sizes));
    report.put("empty_level", outcome.empty_level.map_or(Value::Null, |j| json!(j)));
    report.put("chain_found", outcome.chain.is_some());
    if let Some(chain) = &outcome.chain {
        report.put("chain", json!(chain.iter().map(interpolation_json).collect::<Vec<_>>()));
    }
    Ok(())
}

fn job_transport(manifest: &Manifest, job: &Job, report: &mut Report) -> JobResult {
    let family = target_family(manifest, job)?;
    let sub = subgroup_option(job, family.gamma())?;
    let moved = localglobal::transport_family(family, &sub);
    report.put("subgroup_order", sub.order());
    report.put("locals_in", family.len());
    report.put("locals_out", moved.family.len());
    report.put("dense_in", localglobal::check_density(family));
    report.put("dense_out", localglobal::check_density(&moved.family));
    Ok(())
}
