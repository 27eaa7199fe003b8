//! Generalised Paley graphs GPaley(q, (q - 1)/k): parameters, construction,
//! classification, component decomposition and the Hamming isomorphism.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, divisors, is_prime};
use crate::error::{Error, ParamViolation, Result};
use crate::field::{build_field, build_field_bounded, FieldElement, FieldSpec, DEFAULT_MAX_Q};
use crate::graph::{
    cayley_graph, connected_components, hamming_graph, induced_subgraph, is_isomorphic, tuple_index, Graph,
};

pub const SCHEMA: &str = "gpaley/1";

/// Largest graph the isomorphism oracle is asked to certify.
const ORACLE_VERTICES: usize = 256;

/// The integer data `(p, R, k)` of a parameter pair, validated but with no
/// field attached. Everything arithmetic about a pair lives here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamSpec {
    p: u64,
    degree: u32,
    q: u64,
    k: u64,
}

impl ParamSpec {
    pub fn new(p: u64, degree: u32, k: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = checked_pow(p, degree).ok_or(Error::BoundExceeded { value: u64::MAX, bound: u64::MAX })?;
        Self::check(q, k)?;
        Ok(ParamSpec { p, degree, q, k })
    }

    /// The conditions on `(q, k)` alone.
    pub fn check(q: u64, k: u64) -> Result<()> {
        let violation = if k < 2 {
            Some(ParamViolation::KTooSmall { k })
        } else if !(q - 1).is_multiple_of(k) {
            Some(ParamViolation::NotADivisor { k, q })
        } else if q % 2 == 1 && ((q - 1) / k) % 2 == 1 {
            Some(ParamViolation::Parity { q, k, valency: (q - 1) / k })
        } else {
            None
        };
        violation.map_or(Ok(()), |v| Err(Error::InvalidParams(v)))
    }

    /// Every valid pair with `q <= max_q`, in increasing `(q, k)` order.
    pub fn enumerate(max_q: u64) -> Vec<ParamSpec> {
        let mut out = Vec::new();
        for q in 3..=max_q {
            let Some((p, degree)) = crate::arith::prime_power(q) else { continue };
            for k in divisors(q - 1) {
                if let Ok(spec) = ParamSpec::new(p, degree, k) {
                    out.push(spec);
                }
            }
        }
        out
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `|S| = (q - 1)/k`.
    pub fn valency(&self) -> u64 {
        (self.q - 1) / self.k
    }

    fn subfield_order(&self, a: u32) -> u64 {
        self.p.pow(a)
    }

    fn proper_divisors(&self) -> impl Iterator<Item = u32> {
        let r = self.degree;
        (1..r).filter(move |a| r.is_multiple_of(*a))
    }

    /// Connectivity from arithmetic alone: no proper divisor `a` of `R` has
    /// `(q - 1)/(p^a - 1)` dividing `k`.
    pub fn is_connected_by_criterion(&self) -> bool {
        self.proper_divisors().all(|a| !self.k.is_multiple_of((self.q - 1) / (self.subfield_order(a) - 1)))
    }

    /// The degree of the smallest subfield containing `S`: the least divisor
    /// `a` of `R` with `|S|` dividing `p^a - 1`.
    pub fn span_degree_by_arithmetic(&self) -> u32 {
        let valency = self.valency();
        (1..=self.degree)
            .filter(|a| self.degree.is_multiple_of(*a))
            .find(|&a| (self.subfield_order(a) - 1).is_multiple_of(valency))
            .expect("a = R always qualifies")
    }

    /// `Some((a, b))` when `k R (p^a - 1) = a (q - 1)` for a proper divisor
    /// `a` of `R`, with `b = R/a`.
    pub fn hamming_parameters(&self) -> Result<Option<(u32, u32)>> {
        let hits: Vec<u32> = self
            .proper_divisors()
            .filter(|&a| {
                let lhs = self.k as u128 * self.degree as u128 * (self.subfield_order(a) - 1) as u128;
                lhs == a as u128 * (self.q - 1) as u128
            })
            .collect();
        match hits.as_slice() {
            [] => Ok(None),
            [a] => Ok(Some((*a, self.degree / a))),
            _ => Err(Error::Inconsistent(format!(
                "several Hamming divisors {hits:?} for q = {}, k = {}",
                self.q, self.k
            ))),
        }
    }

    pub fn classify(&self) -> Result<Classification> {
        let hamming = self.hamming_parameters()?;
        let variant = if !self.is_connected_by_criterion() {
            let a = self.span_degree_by_arithmetic();
            if let Some((ha, hb)) = hamming {
                return Err(Error::Inconsistent(format!(
                    "q = {}, k = {} satisfies the Hamming condition with a = {ha}, b = {hb}, but S spans only \
                     GF({}^{a}): the graph is {} disjoint copies of a graph on {} vertices, not H({}, {hb})",
                    self.q,
                    self.k,
                    self.p,
                    self.p.pow(self.degree - a),
                    self.subfield_order(a),
                    self.subfield_order(ha),
                )));
            }
            if a == self.degree {
                return Err(Error::Inconsistent(format!(
                    "q = {}, k = {} fails the connectivity criterion but S spans the field",
                    self.q, self.k
                )));
            }
            Variant::Disconnected {
                a,
                k_prime: (self.subfield_order(a) - 1) / self.valency(),
                component_count: self.p.pow(self.degree - a),
            }
        } else if let Some((a, b)) = hamming {
            Variant::Hamming { a, b }
        } else {
            Variant::ConnectedNonHamming
        };
        Ok(Classification { params: *self, variant, one_dim_affine_case: (self.p - 1).is_multiple_of(self.k) })
    }
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GPaley({}, {}) [p={}, R={}, k={}]", self.q, self.valency(), self.p, self.degree, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Disconnected { a: u32, k_prime: u64, component_count: u64 },
    Hamming { a: u32, b: u32 },
    ConnectedNonHamming,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Disconnected { .. } => "Disconnected",
            Variant::Hamming { .. } => "Hamming",
            Variant::ConnectedNonHamming => "ConnectedNonHamming",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub params: ParamSpec,
    pub variant: Variant,
    /// `k | p - 1`.
    pub one_dim_affine_case: bool,
}

/// The flat JSON shape of a classification; absent fields are null.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub schema: String,
    pub p: u64,
    #[serde(rename = "R")]
    pub degree: u32,
    pub q: u64,
    pub k: u64,
    pub valency: u64,
    pub variant: String,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub k_prime: Option<u64>,
    pub component_count: Option<u64>,
    pub one_dim_affine_case: bool,
}

impl From<&Classification> for ClassificationRecord {
    fn from(c: &Classification) -> Self {
        let (a, b, k_prime, component_count) = match c.variant {
            Variant::Disconnected { a, k_prime, component_count } => {
                (Some(a), None, Some(k_prime), Some(component_count))
            }
            Variant::Hamming { a, b } => (Some(a), Some(b), None, None),
            Variant::ConnectedNonHamming => (None, None, None, None),
        };
        ClassificationRecord {
            schema: SCHEMA.into(),
            p: c.params.p,
            degree: c.params.degree,
            q: c.params.q,
            k: c.params.k,
            valency: c.params.valency(),
            variant: c.variant.name().into(),
            a,
            b,
            k_prime,
            component_count,
            one_dim_affine_case: c.one_dim_affine_case,
        }
    }
}

impl TryFrom<ClassificationRecord> for Classification {
    type Error = Error;

    fn try_from(r: ClassificationRecord) -> Result<Self> {
        let params = ParamSpec::new(r.p, r.degree, r.k)?;
        let computed = params.classify()?;
        if ClassificationRecord::from(&computed) != r {
            return Err(Error::Inconsistent(format!("record does not match the classification of {params}")));
        }
        Ok(computed)
    }
}

impl Serialize for Classification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ClassificationRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Classification {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let record = ClassificationRecord::deserialize(d)?;
        Classification::try_from(record).map_err(serde::de::Error::custom)
    }
}

/// A validated parameter pair together with its field.
#[derive(Clone, Debug)]
pub struct GPaleyParams {
    spec: ParamSpec,
    field: Arc<FieldSpec>,
}

/// The structure of a disconnected GPaley graph.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub a: u32,
    pub k_prime: u64,
    pub component_count: u64,
    /// The component through 0, induced on the subfield of order `p^a`.
    pub component: Graph,
    /// Representatives `t` with components `t + F_{p^a}`, the first being 0.
    pub translates: Vec<FieldElement>,
    /// An isomorphism from `component` onto the GPaley graph over GF(p^a)
    /// (the complete graph when `k' = 1`), when small enough to certify.
    pub model_isomorphism: Option<Vec<usize>>,
}

/// The map Θ from GF(q) onto `F_{p^a}^b`.
#[derive(Clone, Debug)]
pub struct HammingIsomorphism {
    pub a: u32,
    pub b: u32,
    /// `F_{p^a}` inside GF(q), sorted; coordinates are positions in this list.
    pub subfield: Vec<FieldElement>,
    /// The basis `1, omega^k, ..., omega^((b-1)k)`.
    pub basis: Vec<FieldElement>,
    coords: Vec<Vec<u32>>,
}

impl HammingIsomorphism {
    /// Θ(x) as a tuple of subfield elements.
    pub fn tuple(&self, x: FieldElement) -> Vec<FieldElement> {
        self.coords[x.index()].iter().map(|&c| self.subfield[c as usize]).collect()
    }

    /// Θ as a vertex map onto `hamming_graph(p^a, b)`.
    pub fn vertex_map(&self) -> Vec<usize> {
        let base = self.subfield.len();
        self.coords.iter().map(|c| tuple_index(base, &c.iter().map(|&d| d as usize).collect::<Vec<_>>())).collect()
    }
}

impl GPaleyParams {
    pub fn new(p: u64, degree: u32, k: u64) -> Result<Self> {
        Self::with_bound(p, degree, k, DEFAULT_MAX_Q)
    }

    /// Validates the parameters first, then builds the field subject to `max_q`.
    pub fn with_bound(p: u64, degree: u32, k: u64, max_q: u64) -> Result<Self> {
        let spec = ParamSpec::new(p, degree, k)?;
        let field = build_field_bounded(p, degree, max_q)?;
        Ok(GPaleyParams { spec, field: Arc::new(field) })
    }

    pub fn from_field(field: Arc<FieldSpec>, k: u64) -> Result<Self> {
        let spec = ParamSpec::new(field.p(), field.degree(), k)?;
        Ok(GPaleyParams { spec, field })
    }

    pub fn spec(&self) -> &ParamSpec {
        &self.spec
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.degree
    }

    pub fn q(&self) -> u64 {
        self.spec.q
    }

    pub fn k(&self) -> u64 {
        self.spec.k
    }

    pub fn valency(&self) -> u64 {
        self.spec.valency()
    }

    /// `S = <omega^k>`, in increasing exponent order.
    pub fn connecting_set(&self) -> Vec<FieldElement> {
        (0..self.valency()).map(|i| self.field.omega_pow((i * self.k()) as i64)).collect()
    }

    pub fn build(&self) -> Result<Graph> {
        cayley_graph(&self.field, &self.connecting_set())
    }

    pub fn is_connected_by_criterion(&self) -> bool {
        self.spec.is_connected_by_criterion()
    }

    pub fn hamming_parameters(&self) -> Result<Option<(u32, u32)>> {
        self.spec.hamming_parameters()
    }

    pub fn classify(&self) -> Result<Classification> {
        self.spec.classify()
    }

    /// The F_p-span of `elements`, by closure.
    pub fn span(&self, elements: &[FieldElement]) -> Vec<FieldElement> {
        let f = &self.field;
        let mut member = vec![false; f.size()];
        member[0] = true;
        let mut span = vec![f.zero()];
        for &s in elements {
            if member[s.index()] {
                continue;
            }
            let layer = span.clone();
            let mut multiple = s;
            for _ in 1..f.p() {
                for &u in &layer {
                    let x = f.add(u, multiple);
                    member[x.index()] = true;
                    span.push(x);
                }
                multiple = f.add(multiple, s);
            }
        }
        span.sort_unstable();
        span
    }

    /// `log_p |U|` for `U` the F_p-span of `S`, checked to be a subfield and
    /// to agree with [`ParamSpec::span_degree_by_arithmetic`].
    pub fn span_field_degree(&self) -> Result<u32> {
        let span = self.span(&self.connecting_set());
        let mut a = 0u32;
        let mut size = 1usize;
        while size < span.len() {
            size *= self.p() as usize;
            a += 1;
        }
        if size != span.len() || !self.degree().is_multiple_of(a) {
            return Err(Error::SpanNotSubfield(format!("span has {} elements", span.len())));
        }
        // The subfield of order p^a is unique, so closure under products is
        // equality with it.
        if span != self.field.subfield_elements(a)? {
            return Err(Error::SpanNotSubfield(format!("span of size p^{a} is not GF(p^{a})")));
        }
        let expected = self.spec.span_degree_by_arithmetic();
        if a != expected {
            return Err(Error::Inconsistent(format!("span has degree {a}, arithmetic gives {expected}")));
        }
        Ok(a)
    }

    pub fn decompose(&self) -> Result<Decomposition> {
        let Variant::Disconnected { a, k_prime, component_count } = self.classify()?.variant else {
            return Err(Error::IsConnected);
        };
        if self.span_field_degree()? != a {
            return Err(Error::Inconsistent("span degree differs from classification".into()));
        }
        let graph = self.build()?;
        let subfield = self.field.subfield_elements(a)?;
        let components = connected_components(&graph);
        if components.len() as u64 != component_count {
            return Err(Error::Inconsistent(format!(
                "{} components found, {component_count} predicted",
                components.len()
            )));
        }
        let f = &self.field;
        let mut translates = Vec::with_capacity(components.len());
        for part in &components {
            let t = f.element(part[0])?;
            let mut coset: Vec<usize> = subfield.iter().map(|&u| f.add(t, u).index()).collect();
            coset.sort_unstable();
            if &coset != part {
                return Err(Error::Inconsistent(format!("component through {t} is not a coset of GF(p^{a})")));
            }
            translates.push(t);
        }
        let vertices: Vec<usize> = subfield.iter().map(|x| x.index()).collect();
        let component = induced_subgraph(&graph, &vertices)?;
        let model_isomorphism = if vertices.len() <= ORACLE_VERTICES {
            let model = subfield_model(self.p(), a, k_prime)?;
            let map = is_isomorphic(&component, &model)?.ok_or_else(|| {
                Error::Inconsistent(format!("component is not isomorphic to the model over GF(p^{a})"))
            })?;
            Some(map)
        } else {
            None
        };
        Ok(Decomposition { a, k_prime, component_count, component, translates, model_isomorphism })
    }

    pub fn hamming_isomorphism(&self) -> Result<HammingIsomorphism> {
        let Variant::Hamming { a, b } = self.classify()?.variant else {
            return Err(Error::NotHamming);
        };
        let f = &self.field;
        let subfield = f.subfield_elements(a)?;
        let basis: Vec<FieldElement> = (0..b).map(|j| f.omega_pow(j as i64 * self.k() as i64)).collect();

        // Forward: every tuple over the subfield, summed against the basis.
        let m = subfield.len();
        let mut coords: Vec<Option<Vec<u32>>> = vec![None; f.size()];
        for idx in 0..f.size() {
            let digits = crate::graph::tuple_digits(m, b as usize, idx);
            let u = digits.iter().zip(&basis).fold(f.zero(), |acc, (&d, &x)| f.add(acc, f.mul(subfield[d], x)));
            if coords[u.index()].is_some() {
                return Err(Error::SingularBasis);
            }
            coords[u.index()] = Some(digits.iter().map(|&d| d as u32).collect());
        }
        let coords: Vec<Vec<u32>> = coords.into_iter().map(|c| c.expect("counted above")).collect();

        // Independently: Gaussian elimination over F_p after restricting
        // scalars along the basis gamma^l of the subfield.
        let solver = RestrictedSolver::new(f, a, &basis)?;
        for x in f.elements() {
            let solved = solver.solve(f, x);
            let positions: Vec<u32> = solved
                .iter()
                .map(|mu| subfield.binary_search(mu).map(|i| i as u32))
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Inconsistent("solved coordinate outside the subfield".into()))?;
            if positions != coords[x.index()] {
                return Err(Error::Inconsistent(format!("enumeration and elimination disagree at {x}")));
            }
        }

        let theta = HammingIsomorphism { a, b, subfield, basis, coords };

        // Θ(S) is the set of weight-one tuples.
        let weight_one: HashSet<usize> = self
            .connecting_set()
            .iter()
            .filter(|s| theta.coords[s.index()].iter().filter(|&&c| c != 0).count() == 1)
            .map(|s| s.index())
            .collect();
        let expected_weight_one = b as usize * (m - 1);
        if weight_one.len() != self.valency() as usize || weight_one.len() != expected_weight_one {
            return Err(Error::Inconsistent("Θ(S) is not the set of weight-one tuples".into()));
        }
        let graph = self.build()?;
        let hamming = hamming_graph(m, b as usize, f.size())?;
        if !graph.is_isomorphism_to(&hamming, &theta.vertex_map()) {
            return Err(Error::Inconsistent("Θ does not carry edges onto Hamming edges".into()));
        }
        Ok(theta)
    }
}

/// GPaley(p^a, (p^a - 1)/k') over a freshly built GF(p^a), or `K_{p^a}` when
/// `k' = 1`.
pub fn subfield_model(p: u64, a: u32, k_prime: u64) -> Result<Graph> {
    let field = Arc::new(build_field(p, a)?);
    if k_prime == 1 {
        return Ok(Graph::complete(field.size()));
    }
    GPaleyParams::from_field(field, k_prime)?.build()
}

/// Linear algebra over F_p for coordinates with respect to `gamma^l x_j`.
struct RestrictedSolver {
    p: u64,
    gamma_powers: Vec<FieldElement>,
    /// Inverse of the matrix whose columns are the coefficient vectors of
    /// `gamma^l x_j`, column index `j a + l`.
    inverse: Vec<Vec<u64>>,
}

impl RestrictedSolver {
    fn new(f: &FieldSpec, a: u32, basis: &[FieldElement]) -> Result<Self> {
        let p = f.p();
        let r = f.degree() as usize;
        let gamma = f.omega_pow(((f.q() - 1) / (p.pow(a) - 1)) as i64);
        let gamma_powers: Vec<FieldElement> = (0..a).map(|l| f.pow(gamma, l as i64)).collect::<Result<_>>()?;
        let mut columns = Vec::with_capacity(r);
        for &x in basis {
            for &g in &gamma_powers {
                columns.push(f.coeffs(f.mul(g, x)));
            }
        }
        if columns.len() != r {
            return Err(Error::SingularBasis);
        }
        // Augmented [M | I], M[i][c] = columns[c][i].
        let mut rows: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut row: Vec<u64> = columns.iter().map(|c| c[i] as u64).collect();
                row.extend((0..r).map(|j| (i == j) as u64));
                row
            })
            .collect();
        for col in 0..r {
            let pivot = (col..r).find(|&i| rows[i][col] != 0).ok_or(Error::SingularBasis)?;
            rows.swap(col, pivot);
            let inv = mod_inverse(rows[col][col], p);
            for v in rows[col].iter_mut() {
                *v = *v * inv % p;
            }
            for i in 0..r {
                if i != col && rows[i][col] != 0 {
                    let factor = rows[i][col];
                    let pivot_row = rows[col].clone();
                    for (v, w) in rows[i].iter_mut().zip(pivot_row) {
                        *v = (*v + p * p - factor * w) % p;
                    }
                }
            }
        }
        let inverse = rows.into_iter().map(|row| row[r..].to_vec()).collect();
        Ok(RestrictedSolver { p, gamma_powers, inverse })
    }

    /// Coordinates `mu_j = sum_l c_{jl} gamma^l` of `x`.
    fn solve(&self, f: &FieldSpec, x: FieldElement) -> Vec<FieldElement> {
        let v = f.coeffs(x);
        let c: Vec<u64> = self
            .inverse
            .iter()
            .map(|row| row.iter().zip(&v).map(|(&m, &e)| m * e as u64).sum::<u64>() % self.p)
            .collect();
        let a = self.gamma_powers.len();
        c.chunks(a)
            .map(|chunk| {
                chunk
                    .iter()
                    .zip(&self.gamma_powers)
                    .fold(f.zero(), |acc, (&cl, &g)| f.add(acc, f.mul(f.from_int(cl as i64), g)))
            })
            .collect()
    }
}

fn mod_inverse(x: u64, p: u64) -> u64 {
    let mut result = 1;
    let mut base = x % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}
