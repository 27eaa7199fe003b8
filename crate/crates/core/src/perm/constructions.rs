//! The concrete groups that act on generalised Paley graphs and Hamming
//! graphs.

use super::{Permutation, PermutationGroup};
use crate::error::{Error, ParamViolation, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::graph::{tuple_digits, tuple_index};

/// The permutation of vertex indices induced by a map on field elements.
pub fn field_map(field: &FieldSpec, f: impl Fn(FieldElement) -> FieldElement) -> Result<Permutation> {
    Permutation::from_images(field.elements().map(|x| f(x).index()).collect())
}

fn translation_generators(field: &FieldSpec) -> Vec<Permutation> {
    (0..field.degree())
        .map(|j| {
            let y = field.monomial(j);
            field_map(field, |x| field.add(x, y)).expect("translations are bijective")
        })
        .collect()
}

fn frobenius_map(field: &FieldSpec) -> Permutation {
    field_map(field, |x| field.frobenius(x)).expect("Frobenius is bijective")
}

/// The translation group `T = {x -> x + y}`, regular of order `q`.
pub fn translations(field: &FieldSpec) -> PermutationGroup {
    PermutationGroup::new(field.size(), translation_generators(field)).expect("matching degrees")
}

/// AΓL(1, q) = T ⋊ <x -> x·omega, x -> x^p>, of order `q (q - 1) R`.
pub fn agl_one(field: &FieldSpec) -> PermutationGroup {
    let mut gens = translation_generators(field);
    let omega = field.omega();
    gens.push(field_map(field, |x| field.mul(x, omega)).expect("scalar maps are bijective"));
    gens.push(frobenius_map(field));
    PermutationGroup::new(field.size(), gens).expect("matching degrees")
}

/// T ⋊ <W, α> with `W = <x -> x·omega^k>`: the automorphisms of GPaley every
/// parameter choice guarantees. Order `q · (q - 1)/k · R`.
pub fn affine_generators(field: &FieldSpec, k: u64) -> Result<PermutationGroup> {
    let q = field.q();
    if k == 0 || !(q - 1).is_multiple_of(k) {
        return Err(Error::InvalidParams(ParamViolation::NotADivisor { k, q }));
    }
    let mut gens = translation_generators(field);
    let scalar = field.omega_pow(k as i64);
    gens.push(field_map(field, |x| field.mul(x, scalar))?);
    gens.push(frobenius_map(field));
    PermutationGroup::new(field.size(), gens)
}

/// S_a ≀ S_b in product action on `b`-tuples over `[0, a)`, tuples in
/// lexicographic order.
pub fn wreath_product_action(a: usize, b: usize, max_vertices: usize) -> Result<PermutationGroup> {
    let n = (a as u64)
        .checked_pow(b as u32)
        .filter(|&n| n <= max_vertices as u64)
        .ok_or(Error::BoundExceeded { value: (a as u64).saturating_pow(b as u32), bound: max_vertices as u64 })?
        as usize;
    let on_tuples = |f: &dyn Fn(&mut Vec<usize>)| {
        let images = (0..n)
            .map(|v| {
                let mut t = tuple_digits(a, b, v);
                f(&mut t);
                tuple_index(a, &t)
            })
            .collect();
        Permutation::from_images(images).expect("tuple maps are bijective")
    };
    let mut gens = Vec::new();
    if a >= 2 && b >= 1 {
        gens.push(on_tuples(&|t| {
            t[0] = match t[0] {
                0 => 1,
                1 => 0,
                x => x,
            }
        }));
        gens.push(on_tuples(&|t| t[0] = (t[0] + 1) % a));
    }
    if b >= 2 {
        gens.push(on_tuples(&|t| t.swap(0, 1)));
        gens.push(on_tuples(&|t| t.rotate_right(1)));
    }
    gens.retain(|g| !g.is_identity());
    PermutationGroup::new(n, gens)
}
