//! Isomorphism classes of the subtree family and the sample forest built
//! from them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::canonical::{canonical_form, CanonicalKey};
use crate::decompose::Decomposition;
use crate::design::Triple;
use crate::hypertree::Hypertree;

/// A 3-uniform hypergraph on `0..order`; used for forests of hypertrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Forest {
    pub order: u32,
    pub edges: Vec<Triple>,
}

impl Forest {
    /// Disjoint union, relabeling `other` after `self`.
    pub fn add_component(&mut self, t: &Hypertree) -> u32 {
        let offset = self.order;
        self.edges
            .extend(t.edges().iter().map(|e| e.map(|v| v + offset)));
        self.order += t.n();
        offset
    }
}

impl From<&Hypertree> for Forest {
    fn from(t: &Hypertree) -> Self {
        Self {
            order: t.n(),
            edges: t.edges().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoClass {
    pub key: CanonicalKey,
    /// Local copy of the first member.
    pub representative: Hypertree,
    #[serde(skip)]
    pub representative_order: Vec<u32>,
    /// Subtree indices, ascending.
    pub members: Vec<usize>,
    /// Copies of the representative in the sample forest.
    pub lambda: u64,
}

impl IsoClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// The subtrees grouped by isomorphism type, classes ordered by first member.
#[derive(Debug, Clone, Serialize)]
pub struct IsoClassPartition {
    pub classes: Vec<IsoClass>,
    pub l: usize,
    pub k: u32,
    /// `min(k·3^k, l)`: how many subtrees the sample forest stands for.
    pub sample_size: u64,
    /// Class of each subtree.
    pub class_of: Vec<usize>,
    /// Canonical vertex order of each subtree, in local labels.
    #[serde(skip)]
    pub member_orders: Vec<Vec<u32>>,
}

impl IsoClassPartition {
    pub fn t(&self) -> usize {
        self.classes.len()
    }

    /// `⌈l / sample_size⌉` copies of the forest are needed.
    pub fn copies_needed(&self) -> usize {
        if self.l == 0 {
            0
        } else {
            self.l.div_ceil(self.sample_size as usize)
        }
    }
}

/// `k·3^k`, or `None` past `u128`.
pub fn k_three_pow_k(k: u32) -> Option<u128> {
    3u128.checked_pow(k)?.checked_mul(k as u128)
}

/// Groups the subtrees of `dec` by canonical key and sizes each class's share
/// of a sample of `min(k·3^k, l)` subtrees: `λ_i = ⌈s·l_i / l⌉`.
pub fn partition_classes(dec: &Decomposition) -> IsoClassPartition {
    let l = dec.subtrees.len();
    let k = dec.k;
    let sample_size = match k_three_pow_k(k) {
        Some(full) if full < l as u128 => full as u64,
        _ => l as u64,
    };
    let mut classes: Vec<IsoClass> = Vec::new();
    let mut by_key: BTreeMap<CanonicalKey, usize> = BTreeMap::new();
    let mut class_of = Vec::with_capacity(l);
    let mut member_orders = Vec::with_capacity(l);
    for (i, p) in dec.subtrees.iter().enumerate() {
        let local = p.to_local().expect("decomposition subtrees are hypertrees");
        let form = canonical_form(&local);
        let c = *by_key.entry(form.key.clone()).or_insert_with(|| {
            classes.push(IsoClass {
                key: form.key.clone(),
                representative: local.clone(),
                representative_order: form.order.clone(),
                members: Vec::new(),
                lambda: 0,
            });
            classes.len() - 1
        });
        classes[c].members.push(i);
        class_of.push(c);
        member_orders.push(form.order);
    }
    for class in &mut classes {
        class.lambda = (sample_size * class.size() as u64).div_ceil(l as u64);
    }
    IsoClassPartition {
        classes,
        l,
        k,
        sample_size,
        class_of,
        member_orders,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ForestComponent {
    pub class: usize,
    pub offset: u32,
    pub size: u32,
}

/// `F`: `λ_i` disjoint copies of each class representative.
#[derive(Debug, Clone, Serialize)]
pub struct SampleForest {
    pub forest: Forest,
    pub components: Vec<ForestComponent>,
}

impl SampleForest {
    /// `r = |V(F)|`.
    pub fn r(&self) -> u32 {
        self.forest.order
    }

    /// `f = |E(F)|`.
    pub fn f(&self) -> usize {
        self.forest.edges.len()
    }

    /// `λ`, the number of components.
    pub fn lambda(&self) -> usize {
        self.components.len()
    }

    pub fn component_tree<'a>(&self, partition: &'a IsoClassPartition, i: usize) -> &'a Hypertree {
        &partition.classes[self.components[i].class].representative
    }
}

pub fn build_sample_forest(partition: &IsoClassPartition) -> SampleForest {
    let mut forest = Forest {
        order: 0,
        edges: Vec::new(),
    };
    let mut components = Vec::new();
    for (class, c) in partition.classes.iter().enumerate() {
        for _ in 0..c.lambda {
            let offset = forest.add_component(&c.representative);
            components.push(ForestComponent {
                class,
                offset,
                size: c.representative.n(),
            });
        }
    }
    SampleForest { forest, components }
}

/// The forest size with the unclipped sample `k·3^k`, in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrictBounds {
    /// `r = Σ ⌈k3^k l_i / l⌉ |V(T_i)|`, in decimal (abbreviated past 40 digits).
    pub r: String,
    /// `k(k+4)3^k`, in decimal.
    pub size_cap: String,
    /// `r ≤ k(k+4)3^k`.
    pub within_size_cap: bool,
    /// `r ≤ (k3^k n / l)(1 + μ/2)`, with μ rounded down to a multiple of 2^-32.
    pub within_density_cap: bool,
    /// `t < 3^k`.
    pub classes_below_polya: bool,
    /// Decimal digits of `r`.
    pub r_digits: usize,
}

/// Evaluates both forest-size bounds for `partition` of a tree on `n`
/// vertices with slack `mu`.
pub fn strict_forest_bounds(partition: &IsoClassPartition, n: u32, mu: f64) -> StrictBounds {
    let k = partition.k;
    let three_k = BigUint::from(3u32).pow(k);
    let sample = &three_k * k;
    let l = BigUint::from(partition.l.max(1));
    let mut r = BigUint::zero();
    for c in &partition.classes {
        let num = &sample * c.size();
        let lambda = (&num + &l - BigUint::one()) / &l;
        r += lambda * c.representative.n();
    }
    let size_cap = &three_k * (k as u64 * (k as u64 + 4));

    const SCALE: u64 = 1 << 32;
    let mu_scaled = if mu > 0.0 { (mu * SCALE as f64) as u64 } else { 0 };
    let lhs = &r * &l * (2 * SCALE);
    let rhs = &sample * n * (2 * SCALE + mu_scaled);

    let t = BigUint::from(partition.t());
    let r_text = r.to_str_radix(10);
    StrictBounds {
        r_digits: r_text.len(),
        within_size_cap: r <= size_cap,
        within_density_cap: lhs <= rhs,
        classes_below_polya: t < three_k,
        size_cap: abbreviate(size_cap.to_str_radix(10)),
        r: abbreviate(r_text),
    }
}

fn abbreviate(digits: String) -> String {
    if digits.len() <= 40 {
        return digits;
    }
    format!("{}.{}e{}", &digits[..1], &digits[1..12], digits.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::saw;
    use crate::hypertree::{annotate, subdivide, GraphTree};

    fn k13_partition() -> IsoClassPartition {
        let t = subdivide(&GraphTree::new(4, alloc::vec![(0, 1), (0, 2), (0, 3)]).unwrap());
        let dec = saw(&t, &annotate(&t, None).unwrap(), 4).unwrap();
        partition_classes(&dec)
    }

    #[test]
    fn singleton_subtrees_form_one_class() {
        let p = k13_partition();
        assert_eq!(p.t(), 1);
        assert_eq!(p.l, 3);
        assert_eq!(p.sample_size, 3);
        assert_eq!(p.classes[0].lambda, 3);
        assert_eq!(p.copies_needed(), 1);
        let f = build_sample_forest(&p);
        assert_eq!(f.r(), 3);
        assert_eq!(f.f(), 0);
    }

    #[test]
    fn clipped_sample_keeps_supply() {
        // k = 1 gives k·3^k = 3 < l, so the forest is a proper sample.
        let t = subdivide(&GraphTree::new(4, alloc::vec![(0, 1), (0, 2), (0, 3)]).unwrap());
        let dec = saw(&t, &annotate(&t, None).unwrap(), 4).unwrap();
        let mut dec = dec;
        dec.k = 1;
        let p = partition_classes(&dec);
        assert_eq!(p.sample_size, 3);
        for c in &p.classes {
            assert!(c.lambda * p.copies_needed() as u64 >= c.size() as u64);
        }
    }

    #[test]
    fn strict_bounds_small_k() {
        let p = k13_partition();
        let b = strict_forest_bounds(&p, 7, 0.5);
        // λ = ⌈4·81·3/3⌉ = 324 singleton copies; cap 4·8·81 = 2592.
        assert_eq!(b.r, "324");
        assert_eq!(b.size_cap, "2592");
        assert!(b.within_size_cap);
        assert!(b.classes_below_polya);
    }
}
