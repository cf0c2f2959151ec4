use std::sync::Arc;

use super::character::{characters, short_chars, top_coefficients};
use super::rot::lcm;
use super::{unit_group, DirichletChar, HayesChar, ShortChar, UnitGroup};
use crate::error::Result;
use crate::gf::Field;
use crate::poly::Poly;

/// The group X_{M,ν} with class tables for fast evaluation.
///
/// A monic G coprime to M has class `a + φ(M)·b`, with `a` its unit index mod M
/// and `b` the index of its top ν+1 coefficients among the q^ν leading patterns.
/// Character (i, j) pairs the i-th Dirichlet character with the j-th short one.
#[derive(Debug, Clone)]
pub struct HayesFamily {
    field: Field,
    nu: usize,
    dir_group: Arc<UnitGroup>,
    dir: Vec<DirichletChar>,
    short: Vec<ShortChar>,
    // radix index in the t^{ν+1} group divided by the constant part
    short_stride: u32,
    denominator: u32,
}

impl HayesFamily {
    pub fn new(modulus: &Poly, nu: usize, f: &Field) -> Result<HayesFamily> {
        let dir_group = unit_group(modulus, f)?;
        let dir = characters(&dir_group);
        let short = short_chars(nu, f)?;
        let sg = short[0].base().group().clone();
        let short_stride = if sg.rank() > 0 && sg.is_cyclic_generator(0) { sg.orders()[0] } else { 1 };
        let denominator = lcm(dir_group.exponent() as u64, sg.exponent() as u64) as u32;
        Ok(HayesFamily { field: f.clone(), nu, dir_group, dir, short, short_stride, denominator })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn modulus(&self) -> &Poly {
        self.dir_group.modulus()
    }

    pub fn dir_group(&self) -> &Arc<UnitGroup> {
        &self.dir_group
    }

    pub fn dir_chars(&self) -> &[DirichletChar] {
        &self.dir
    }

    pub fn short_chars(&self) -> &[ShortChar] {
        &self.short
    }

    pub fn phi(&self) -> u64 {
        self.dir_group.phi()
    }

    pub fn short_count(&self) -> usize {
        self.short.len()
    }

    /// φ(M) q^ν: the number of characters and of reduced classes.
    pub fn len(&self) -> usize {
        self.dir.len() * self.short.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every value is a power of e(1/denominator).
    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn hayes(&self, i: usize, j: usize) -> HayesChar {
        HayesChar::new(self.dir[i].clone(), self.short[j].clone()).expect("parts share the field")
    }

    pub fn short_class(&self, g: &Poly) -> u32 {
        let sg = self.short[0].base().group();
        let r = sg.dlog(&top_coefficients(g, self.nu)).expect("leading coefficient is a unit");
        debug_assert_eq!(r % self.short_stride, 0);
        r / self.short_stride
    }

    /// Class of a monic G, or None when (G, M) ≠ 1.
    pub fn class_of(&self, g: &Poly) -> Option<u32> {
        let a = self.dir_group.dlog(g)?;
        Some(a + self.phi() as u32 * self.short_class(g))
    }

    pub fn class_of_parts(&self, unit: u32, short: u32) -> u32 {
        unit + self.phi() as u32 * short
    }

    /// Numerators (over `denominator`) of ψ_i on unit indices mod M.
    pub fn dir_table(&self, i: usize) -> Vec<u32> {
        let s = self.denominator / self.dir[i].denominator();
        self.dir[i].table().into_iter().map(|k| k * s).collect()
    }

    /// Numerators (over `denominator`) of ξ_j on short classes.
    pub fn short_table(&self, j: usize) -> Vec<u32> {
        let x = &self.short[j];
        let s = self.denominator / x.base().denominator();
        (0..self.short.len() as u32).map(|b| x.base().rot_at(b * self.short_stride) * s).collect()
    }

    /// A monic representative of every class: degree deg M + ν, coprime to M.
    pub fn representatives(&self) -> Vec<Poly> {
        let f = &self.field;
        let n = self.modulus().degree() + self.nu;
        let mut reps: Vec<Option<Poly>> = vec![None; self.len()];
        for g in crate::poly::Monics::new(f.q(), n).expect("class count is within budget") {
            if let Some(c) = self.class_of(&g) {
                reps[c as usize].get_or_insert(g);
            }
        }
        reps.into_iter().map(|r| r.expect("every class meets degree deg M + ν")).collect()
    }
}
