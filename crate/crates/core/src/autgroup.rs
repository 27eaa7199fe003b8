//! Automorphism groups of graphs and coloured complete graphs, and the
//! harness that checks a GPaley graph's group against its classification.

use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::factorial;
use crate::cyclotomic::CyclotomicScheme;
use crate::error::{Error, Result};
use crate::gpaley::{subfield_model, Classification, GPaleyParams, Variant, SCHEMA};
use crate::graph::Graph;
use crate::perm::{affine_generators, agl_one, translations, wreath_product_action, Permutation, PermutationGroup};
use crate::search::{coloring_automorphisms, graph_automorphisms, AutSearch, SearchOptions};

/// The full automorphism group of `g`. Every generator is checked against
/// the graph and the Schreier–Sims order against the search's own count.
pub fn automorphism_group(g: &Graph, opts: &SearchOptions) -> Result<PermutationGroup> {
    let found = graph_automorphisms(g, opts)?;
    if let Some(bad) = found.generators.iter().find(|gen| !g.is_automorphism(gen)) {
        return Err(Error::Inconsistent(format!("search returned a non-automorphism {bad:?}")));
    }
    into_group(g.n(), found)
}

/// Permutations preserving every colour class of ordered pairs, with
/// `coloring[x * n + y]` the colour of `(x, y)`.
pub fn color_automorphism_group(n: usize, coloring: &[u8], opts: &SearchOptions) -> Result<PermutationGroup> {
    let found = coloring_automorphisms(n, coloring, opts)?;
    for gen in &found.generators {
        let preserved = (0..n).all(|x| (0..n).all(|y| coloring[x * n + y] == coloring[gen[x] * n + gen[y]]));
        if !preserved {
            return Err(Error::Inconsistent(format!("search returned a colour-breaking map {gen:?}")));
        }
    }
    into_group(n, found)
}

fn into_group(n: usize, found: AutSearch) -> Result<PermutationGroup> {
    let expected = found.order();
    let gens = found.generators.into_iter().map(Permutation::from_images).collect::<Result<Vec<_>>>()?;
    let group = PermutationGroup::with_base_hint(n, gens, found.base)?;
    let order = group.order();
    if order != expected {
        return Err(Error::Inconsistent(format!("Schreier–Sims order {order} but search counted {expected}")));
    }
    Ok(group)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Primitive,
    ContainedInAffine,
    NormalCayley,
    ArcTransitiveSubgroupPresent,
    WreathStructure,
    HammingOrder,
    OneDimAffineOrder,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::Primitive,
        CheckName::ContainedInAffine,
        CheckName::NormalCayley,
        CheckName::ArcTransitiveSubgroupPresent,
        CheckName::WreathStructure,
        CheckName::HammingOrder,
        CheckName::OneDimAffineOrder,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Primitive => "primitive",
            CheckName::ContainedInAffine => "contained_in_affine",
            CheckName::NormalCayley => "normal_cayley",
            CheckName::ArcTransitiveSubgroupPresent => "arc_transitive_subgroup_present",
            CheckName::WreathStructure => "wreath_structure",
            CheckName::HammingOrder => "hamming_order",
            CheckName::OneDimAffineOrder => "one_dim_affine_order",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One named check; `passed` is `None` where the check does not apply to
/// the classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub passed: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub search: SearchOptions,
    /// Seed for the relabelling sanity check.
    pub seed: u64,
    pub emit_generators: bool,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub classification: Classification,
    pub computed_aut_order: BigUint,
    pub predicted_aut_order: Option<BigUint>,
    /// Order of the stabiliser of vertex 0.
    pub stabilizer_order: BigUint,
    /// `|Aut|` recomputed on a randomly relabelled copy of the graph.
    pub relabeled_aut_order: BigUint,
    /// `|AΓL(1, q)|`.
    pub agl_one_order: BigUint,
    /// Derived series of the vertex stabiliser, for connected non-Hamming
    /// graphs outside the one-dimensional case.
    pub stabilizer_derived_series: Option<Vec<BigUint>>,
    pub checks: Vec<CheckResult>,
    pub base: Vec<usize>,
    pub generators: Option<Vec<Permutation>>,
}

impl VerificationReport {
    pub fn check(&self, name: CheckName) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).and_then(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<CheckName> {
        self.checks.iter().filter(|c| c.passed == Some(false)).map(|c| c.name).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.failed_checks().is_empty() && self.relabeled_aut_order == self.computed_aut_order
    }

    pub fn into_result(self) -> Result<Self> {
        if self.all_passed() {
            return Ok(self);
        }
        let mut names: Vec<String> = self.failed_checks().iter().map(|c| c.to_string()).collect();
        if self.relabeled_aut_order != self.computed_aut_order {
            names.push("relabel_invariance".into());
        }
        Err(Error::CheckFailed(names.join(", ")))
    }
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    schema: String,
    classification: Classification,
    computed_aut_order: String,
    predicted_aut_order: Option<String>,
    stabilizer_order: String,
    relabeled_aut_order: String,
    agl_one_order: String,
    stabilizer_derived_series: Option<Vec<String>>,
    all_passed: bool,
    checks: Vec<CheckResult>,
    base: Vec<usize>,
    generators: Option<Vec<Permutation>>,
}

fn parse_order(s: &str) -> std::result::Result<BigUint, String> {
    s.parse::<BigUint>().map_err(|e| format!("bad order {s:?}: {e}"))
}

impl Serialize for VerificationReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            schema: SCHEMA.into(),
            classification: self.classification.clone(),
            computed_aut_order: self.computed_aut_order.to_string(),
            predicted_aut_order: self.predicted_aut_order.as_ref().map(|o| o.to_string()),
            stabilizer_order: self.stabilizer_order.to_string(),
            relabeled_aut_order: self.relabeled_aut_order.to_string(),
            agl_one_order: self.agl_one_order.to_string(),
            stabilizer_derived_series: self
                .stabilizer_derived_series
                .as_ref()
                .map(|v| v.iter().map(|o| o.to_string()).collect()),
            all_passed: self.all_passed(),
            checks: self.checks.clone(),
            base: self.base.clone(),
            generators: self.generators.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VerificationReport {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ReportJson::deserialize(d)?;
        let order = |s: &str| parse_order(s).map_err(D::Error::custom);
        Ok(VerificationReport {
            classification: j.classification,
            computed_aut_order: order(&j.computed_aut_order)?,
            predicted_aut_order: j.predicted_aut_order.as_deref().map(order).transpose()?,
            stabilizer_order: order(&j.stabilizer_order)?,
            relabeled_aut_order: order(&j.relabeled_aut_order)?,
            agl_one_order: order(&j.agl_one_order)?,
            stabilizer_derived_series: j
                .stabilizer_derived_series
                .map(|v| v.iter().map(|s| order(s)).collect::<std::result::Result<Vec<_>, _>>())
                .transpose()?,
            checks: j.checks,
            base: j.base,
            generators: j.generators,
        })
    }
}

/// A uniformly random relabelling, reproducible from `seed`.
pub fn random_relabeling(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

struct Harness<'a> {
    params: &'a GPaleyParams,
    group: &'a PermutationGroup,
    order: &'a BigUint,
    opts: &'a VerifyOptions,
    checks: Vec<CheckResult>,
}

impl Harness<'_> {
    fn record(&mut self, name: CheckName, passed: Option<bool>, detail: impl Into<String>) {
        self.checks.push(CheckResult { name, passed, detail: detail.into() });
    }

    fn not_applicable(&mut self, name: CheckName) {
        self.record(name, None, "not applicable");
    }

    fn contains_all(&self, gens: &[Permutation]) -> Result<bool> {
        for g in gens {
            if !self.group.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// T ⋊ <W, α> lies in the group and `q (q - 1)/k` divides its order.
    fn arc_transitive_subgroup(&mut self) -> Result<()> {
        let affine = affine_generators(self.params.field(), self.params.k())?;
        let q = self.params.q();
        let contained = self.contains_all(affine.generators())?;
        let divides = (self.order % BigUint::from(q * self.params.valency())) == BigUint::from(0u32);
        self.record(
            CheckName::ArcTransitiveSubgroupPresent,
            Some(contained && divides),
            format!(
                "affine subgroup of order {} contained: {contained}; q(q-1)/k divides |Aut|: {divides}",
                affine.order()
            ),
        );
        Ok(())
    }

    fn disconnected(&mut self, a: u32, k_prime: u64, m: u64) -> Result<BigUint> {
        let decomposition = self.params.decompose()?;
        let component = automorphism_group(&decomposition.component, &self.opts.search)?.order();
        let model = automorphism_group(&subfield_model(self.params.p(), a, k_prime)?, &self.opts.search)?.order();
        let predicted = component.pow(m as u32) * factorial(m);
        let ok = component == model && &predicted == self.order;
        self.record(
            CheckName::WreathStructure,
            Some(ok),
            format!("|Aut(component)| = {component}, model over GF(p^{a}) = {model}, |Aut(component)|^{m}·{m}! = {predicted}"),
        );
        Ok(predicted)
    }

    fn hamming(&mut self, a: u32, b: u32) -> Result<BigUint> {
        let theta = self.params.hamming_isomorphism()?;
        let m = theta.subfield.len();
        let predicted = factorial(m as u64).pow(b) * factorial(b as u64);
        self.record(CheckName::HammingOrder, Some(&predicted == self.order), format!("({m}!)^{b}·{b}! = {predicted}"));
        // Pull S_m ≀ S_b back through Θ and test membership.
        let wreath = wreath_product_action(m, b as usize, self.params.field().size())?;
        let forward = theta.vertex_map();
        let mut backward = vec![0; forward.len()];
        for (v, &t) in forward.iter().enumerate() {
            backward[t] = v;
        }
        let pulled = wreath
            .generators()
            .iter()
            .map(|w| Permutation::from_images(forward.iter().map(|&t| backward[w.apply(t)]).collect()))
            .collect::<Result<Vec<_>>>()?;
        let contained = self.contains_all(&pulled)?;
        let wreath_order = wreath.order();
        self.record(
            CheckName::WreathStructure,
            Some(contained && &wreath_order == self.order),
            format!("S_{m} wr S_{b} (a = {a}) of order {wreath_order} contained: {contained}"),
        );
        Ok(predicted)
    }

    fn connected_non_hamming(&mut self, one_dim: bool) -> Result<Option<BigUint>> {
        let primitive = self.group.is_primitive()?;
        self.record(CheckName::Primitive, Some(primitive), "minimal block systems are trivial");
        let t = translations(self.params.field());
        let normalizes = self.group.normalizes(&t)?;
        self.record(CheckName::ContainedInAffine, Some(normalizes), "Aut normalises the translation group");
        let t_inside = self.contains_all(t.generators())?;
        self.record(
            CheckName::NormalCayley,
            Some(t_inside && normalizes),
            format!("translations contained: {t_inside}, normal: {normalizes}"),
        );
        if !one_dim {
            self.not_applicable(CheckName::OneDimAffineOrder);
            return Ok(None);
        }
        let q = self.params.q();
        let predicted = BigUint::from(q) * self.params.degree() * self.params.valency();
        let scheme = CyclotomicScheme::from_params(self.params.clone())?;
        let scheme_order = color_automorphism_group(scheme.size(), &scheme.coloring()?, &self.opts.search)?.order();
        self.record(
            CheckName::OneDimAffineOrder,
            Some(&predicted == self.order && &scheme_order == self.order),
            format!("qR(q-1)/k = {predicted}, scheme colour-automorphism order = {scheme_order}"),
        );
        Ok(Some(predicted))
    }
}

/// Computes `Aut(GPaley(q, (q - 1)/k))` and checks it against what the
/// classification predicts.
pub fn verify_theorem(params: &GPaleyParams, opts: &VerifyOptions) -> Result<VerificationReport> {
    let classification = params.classify()?;
    let graph = params.build()?;
    let group = automorphism_group(&graph, &opts.search)?;
    let order = group.order();

    let relabel = random_relabeling(graph.n(), opts.seed);
    let relabeled_aut_order = automorphism_group(&graph.relabeled(&relabel)?, &opts.search)?.order();

    let mut harness = Harness { params, group: &group, order: &order, opts, checks: Vec::new() };
    harness.arc_transitive_subgroup()?;
    let predicted_aut_order = match classification.variant {
        Variant::Disconnected { a, k_prime, component_count } => {
            Some(harness.disconnected(a, k_prime, component_count)?)
        }
        Variant::Hamming { a, b } => Some(harness.hamming(a, b)?),
        Variant::ConnectedNonHamming => harness.connected_non_hamming(classification.one_dim_affine_case)?,
    };
    let recorded: Vec<CheckName> = harness.checks.iter().map(|c| c.name).collect();
    for name in CheckName::ALL {
        if !recorded.contains(&name) {
            harness.not_applicable(name);
        }
    }
    let mut checks = harness.checks;
    checks.sort_by_key(|c| CheckName::ALL.iter().position(|&n| n == c.name));

    let stabilizer = group.stabilizer(0)?;
    let stabilizer_derived_series = match classification.variant {
        Variant::ConnectedNonHamming if !classification.one_dim_affine_case => {
            Some(stabilizer.derived_series_orders()?)
        }
        _ => None,
    };

    Ok(VerificationReport {
        classification,
        computed_aut_order: order,
        predicted_aut_order,
        stabilizer_order: stabilizer.order(),
        relabeled_aut_order,
        agl_one_order: agl_one(params.field()).order(),
        stabilizer_derived_series,
        checks,
        base: group.bsgs().base(),
        generators: opts.emit_generators.then(|| group.generators().to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_groups() {
        let opts = SearchOptions::automorphism();
        assert_eq!(automorphism_group(&Graph::complete(6), &opts).unwrap().order(), 720u32.into());
        assert_eq!(automorphism_group(&Graph::cycle(5), &opts).unwrap().order(), 10u32.into());
    }

    #[test]
    fn two_colour_case_matches_graph_case() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (2, 3)]).unwrap();
        let n = g.n();
        let coloring: Vec<u8> =
            (0..n * n).map(|i| if i / n != i % n && g.has_edge(i / n, i % n) { 1 } else { 0 }).collect();
        let opts = SearchOptions::automorphism();
        assert_eq!(
            color_automorphism_group(n, &coloring, &opts).unwrap().order(),
            automorphism_group(&g, &opts).unwrap().order()
        );
    }

    #[test]
    fn report_for_thirteen_three() {
        let params = GPaleyParams::new(13, 1, 3).unwrap();
        let report = verify_theorem(&params, &VerifyOptions::default()).unwrap();
        assert_eq!(report.computed_aut_order, 52u32.into());
        assert_eq!(report.predicted_aut_order, Some(52u32.into()));
        assert_eq!(report.check(CheckName::OneDimAffineOrder), Some(true));
        assert_eq!(report.checks.len(), CheckName::ALL.len());
        assert!(report.all_passed());
    }

    #[test]
    fn report_json_round_trip() {
        let params = GPaleyParams::new(3, 2, 2).unwrap();
        let opts = VerifyOptions { emit_generators: true, ..VerifyOptions::default() };
        let report = verify_theorem(&params, &opts).unwrap();
        assert_eq!(report.computed_aut_order, 72u32.into());
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["computed_aut_order"], "72");
        assert_eq!(json["checks"][0]["name"], "primitive");
        let back: VerificationReport = serde_json::from_value(json).unwrap();
        assert_eq!(back.computed_aut_order, report.computed_aut_order);
        assert_eq!(back.generators.map(|g| g.len()), Some(group_len(&report)));
    }

    fn group_len(r: &VerificationReport) -> usize {
        r.generators.as_ref().map_or(0, |g| g.len())
    }
}
