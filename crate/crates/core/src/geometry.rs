//! Exterior calculus on flat space-time with metric signature (-,-,-,+):
//! wedge product, Hodge star, interior product, exterior derivative, Lie
//! bracket and Lie derivative, index raising and lowering.
//!
//! Orientation is fixed by the volume form `dx^dy^dz^dxi`. The Hodge star is
//! defined degree by degree through `alpha ^ *beta = -eta(alpha, beta) vol`,
//! which on 2-forms is an anti-involution.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fields::{Axis, Event, ScalarField, VectorField};

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

/// Diagonal of the metric in the canonical chart. The inverse has the same
/// entries.
pub const METRIC_DIAG: [f64; 4] = [-1.0, -1.0, -1.0, 1.0];

/// Number of independent components of a degree-`k` alternating tensor.
pub fn component_count(degree: usize) -> usize {
    match degree {
        0 | 4 => 1,
        1 | 3 => 4,
        2 => 6,
        _ => 0,
    }
}

/// Strictly increasing multi-indices of each degree, in lexicographic order.
/// For degree two this is (01, 02, 03, 12, 13, 23).
pub fn basis_indices(degree: usize) -> &'static [&'static [usize]] {
    const D0: [&[usize]; 1] = [&[]];
    const D1: [&[usize]; 4] = [&[0], &[1], &[2], &[3]];
    const D2: [&[usize]; 6] = [&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]];
    const D3: [&[usize]; 4] = [&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]];
    const D4: [&[usize]; 1] = [&[0, 1, 2, 3]];
    match degree {
        0 => &D0,
        1 => &D1,
        2 => &D2,
        3 => &D3,
        4 => &D4,
        _ => panic!("degree {degree} out of range"),
    }
}

fn index_position(degree: usize, idx: &[usize]) -> usize {
    basis_indices(degree)
        .iter()
        .position(|b| *b == idx)
        .expect("multi-index not found")
}

fn inversion_sign(perm: &[usize]) -> f64 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Merge two disjoint increasing multi-indices; `None` if they overlap.
/// Returns the sorted union and the parity sign of the concatenation.
fn merge_indices(i: &[usize], j: &[usize]) -> Option<(Vec<usize>, f64)> {
    if i.iter().any(|a| j.contains(a)) {
        return None;
    }
    let mut concat: Vec<usize> = i.to_vec();
    concat.extend_from_slice(j);
    let sign = inversion_sign(&concat);
    concat.sort_unstable();
    Some((concat, sign))
}

/// Product of inverse-metric diagonal entries over a multi-index.
fn metric_factor(idx: &[usize]) -> f64 {
    idx.iter().map(|&a| METRIC_DIAG[a]).product()
}

struct HodgeTable {
    /// For each degree k and component position i: target position in the
    /// complementary degree and the sign.
    map: [Vec<(usize, f64)>; 5],
}

fn hodge_table() -> &'static HodgeTable {
    static TABLE: OnceLock<HodgeTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut map: [Vec<(usize, f64)>; 5] = Default::default();
        for degree in 0..=4 {
            let co_degree = 4 - degree;
            let mut entries = Vec::new();
            for idx in basis_indices(degree) {
                let complement: Vec<usize> =
                    (0..4).filter(|a| !idx.contains(a)).collect();
                let (_, perm_sign) = merge_indices(idx, &complement).expect("disjoint");
                // e_I ^ (s e_Ic) = -eta(e_I, e_I) vol  =>  s = -eta * sign
                let s = -metric_factor(idx) * perm_sign;
                entries.push((index_position(co_degree, &complement), s));
            }
            map[degree] = entries;
        }
        HodgeTable { map }
    })
}

/// Alternating tensor value at a point: components over the strictly
/// increasing multi-indices of `basis_indices`. The same storage serves
/// covariant forms and contravariant multivectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    degree: usize,
    comps: Vec<f64>,
}

impl FormValue {
    pub fn new(degree: usize, comps: Vec<f64>) -> FormValue {
        assert_eq!(comps.len(), component_count(degree));
        FormValue { degree, comps }
    }

    pub fn zero(degree: usize) -> FormValue {
        FormValue::new(degree, vec![0.0; component_count(degree)])
    }

    pub fn basis(degree: usize, position: usize) -> FormValue {
        let mut v = FormValue::zero(degree);
        v.comps[position] = 1.0;
        v
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn comps(&self) -> &[f64] {
        &self.comps
    }

    pub fn comp(&self, position: usize) -> f64 {
        self.comps[position]
    }

    /// Component for an arbitrary (not necessarily sorted) index tuple,
    /// respecting antisymmetry.
    pub fn comp_at(&self, idx: &[usize]) -> f64 {
        let mut sorted = idx.to_vec();
        let sign = inversion_sign(idx);
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return 0.0;
        }
        sign * self.comps[index_position(self.degree, &sorted)]
    }

    pub fn scale(&self, c: f64) -> FormValue {
        FormValue::new(self.degree, self.comps.iter().map(|v| c * v).collect())
    }

    pub fn add(&self, other: &FormValue) -> FormValue {
        assert_eq!(self.degree, other.degree);
        FormValue::new(
            self.degree,
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &FormValue) -> FormValue {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Exterior product of the component arrays.
    pub fn wedge(&self, other: &FormValue) -> Result<FormValue> {
        let degree = self.degree + other.degree;
        if degree > 4 {
            return Err(Error::BadDegree {
                context: "wedge product",
                degree,
            });
        }
        let mut out = FormValue::zero(degree);
        for (i, idx_a) in basis_indices(self.degree).iter().enumerate() {
            if self.comps[i] == 0.0 {
                continue;
            }
            for (j, idx_b) in basis_indices(other.degree).iter().enumerate() {
                if let Some((merged, sign)) = merge_indices(idx_a, idx_b) {
                    let pos = index_position(degree, &merged);
                    out.comps[pos] += sign * self.comps[i] * other.comps[j];
                }
            }
        }
        Ok(out)
    }

    /// Hodge dual with respect to the fixed metric and orientation.
    pub fn hodge(&self) -> FormValue {
        let table = &hodge_table().map[self.degree];
        let mut out = FormValue::zero(4 - self.degree);
        for (i, &(target, sign)) in table.iter().enumerate() {
            out.comps[target] += sign * self.comps[i];
        }
        out
    }

    /// Insertion of a vector into the first slot.
    pub fn interior(&self, x: Vec4) -> Result<FormValue> {
        if self.degree == 0 {
            return Err(Error::BadDegree {
                context: "interior product",
                degree: 0,
            });
        }
        let out_degree = self.degree - 1;
        let mut out = FormValue::zero(out_degree);
        for (pos, idx) in basis_indices(out_degree).iter().enumerate() {
            let mut acc = 0.0;
            for a in 0..4 {
                if idx.contains(&a) {
                    continue;
                }
                let below = idx.iter().filter(|&&j| j < a).count();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                let mut full: Vec<usize> = vec![a];
                full.extend_from_slice(idx);
                full.sort_unstable();
                acc += x[a] * sign * self.comps[index_position(self.degree, &full)];
            }
            out.comps[pos] = acc;
        }
        Ok(out)
    }

    /// Contraction with an ordered pair `(x, y)`: for a k-form this is the
    /// (k-2)-form `w(x, y, ...)`, the insertion of the bivector `x ^ y`.
    pub fn interior2(&self, x: Vec4, y: Vec4) -> Result<FormValue> {
        self.interior(x)?.interior(y)
    }

    /// Value on an ordered tuple of vectors (determinant convention).
    pub fn eval(&self, vectors: &[Vec4]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let mut total = 0.0;
        for (pos, idx) in basis_indices(self.degree).iter().enumerate() {
            if self.comps[pos] == 0.0 {
                continue;
            }
            total += self.comps[pos] * minor_det(vectors, idx);
        }
        total
    }

    /// The alternating tensor spanned by a tuple of vectors.
    pub fn from_wedge_of_vectors(vectors: &[Vec4]) -> FormValue {
        let degree = vectors.len();
        let mut out = FormValue::zero(degree);
        for (pos, idx) in basis_indices(degree).iter().enumerate() {
            out.comps[pos] = minor_det(vectors, idx);
        }
        out
    }

    /// Metric inner product of two same-degree values.
    pub fn metric_dot(&self, other: &FormValue) -> f64 {
        assert_eq!(self.degree, other.degree);
        basis_indices(self.degree)
            .iter()
            .enumerate()
            .map(|(i, idx)| metric_factor(idx) * self.comps[i] * other.comps[i])
            .sum()
    }

    /// Components with every index raised (or lowered; the metric is its own
    /// inverse on the diagonal).
    pub fn raise_all(&self) -> FormValue {
        let mut out = self.clone();
        for (i, idx) in basis_indices(self.degree).iter().enumerate() {
            out.comps[i] *= metric_factor(idx);
        }
        out
    }
}

fn minor_det(vectors: &[Vec4], cols: &[usize]) -> f64 {
    match cols.len() {
        0 => 1.0,
        1 => vectors[0][cols[0]],
        2 => {
            vectors[0][cols[0]] * vectors[1][cols[1]]
                - vectors[0][cols[1]] * vectors[1][cols[0]]
        }
        3 => {
            let m = |r: usize, c: usize| vectors[r][cols[c]];
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        }
        4 => {
            let mut acc = 0.0;
            for c in 0..4 {
                let sub: Vec<usize> = cols.iter().enumerate().filter(|(i, _)| *i != c).map(|(_, v)| *v).collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * vectors[0][cols[c]] * minor_det(&vectors[1..], &sub);
            }
            acc
        }
        _ => unreachable!(),
    }
}

/// Antisymmetric covariant tensor field of fixed degree. Components are
/// scalar fields over the strictly increasing multi-indices; when every
/// component carries an analytic gradient, so do algebraic combinations.
#[derive(Debug, Clone)]
pub struct KForm {
    degree: usize,
    comps: Vec<ScalarField>,
}

impl KForm {
    pub fn new(degree: usize, comps: Vec<ScalarField>) -> KForm {
        assert_eq!(comps.len(), component_count(degree));
        KForm { degree, comps }
    }

    pub fn zero(degree: usize) -> KForm {
        KForm::new(
            degree,
            (0..component_count(degree)).map(|_| ScalarField::zero()).collect(),
        )
    }

    pub fn constant(degree: usize, comps: &[f64]) -> KForm {
        KForm::new(
            degree,
            comps.iter().map(|&c| ScalarField::constant(c)).collect(),
        )
    }

    pub fn scalar(f: ScalarField) -> KForm {
        KForm::new(0, vec![f])
    }

    pub fn one_form(comps: [ScalarField; 4]) -> KForm {
        KForm::new(1, comps.to_vec())
    }

    /// The coordinate basis form of the given degree and position.
    pub fn basis(degree: usize, position: usize) -> KForm {
        let mut comps = vec![0.0; component_count(degree)];
        comps[position] = 1.0;
        KForm::constant(degree, &comps)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn component(&self, position: usize) -> &ScalarField {
        &self.comps[position]
    }

    pub fn value(&self, p: Event) -> FormValue {
        FormValue::new(self.degree, self.comps.iter().map(|f| f.value(p)).collect())
    }

    pub fn scale(&self, c: f64) -> KForm {
        KForm::new(self.degree, self.comps.iter().map(|f| f.scale(c)).collect())
    }

    pub fn scale_field(&self, g: &ScalarField) -> KForm {
        KForm::new(self.degree, self.comps.iter().map(|f| g * f).collect())
    }

    pub fn add(&self, other: &KForm) -> KForm {
        assert_eq!(self.degree, other.degree);
        KForm::new(
            self.degree,
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &KForm) -> KForm {
        self.add(&other.scale(-1.0))
    }
}

/// Exterior product of two forms; bilinear and graded-anticommutative.
pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm> {
    let degree = a.degree + b.degree;
    if degree > 4 {
        return Err(Error::BadDegree {
            context: "wedge product",
            degree,
        });
    }
    let n = component_count(degree);
    let mut terms: Vec<Vec<ScalarField>> = vec![Vec::new(); n];
    for (i, idx_a) in basis_indices(a.degree).iter().enumerate() {
        for (j, idx_b) in basis_indices(b.degree).iter().enumerate() {
            if let Some((merged, sign)) = merge_indices(idx_a, idx_b) {
                let pos = index_position(degree, &merged);
                terms[pos].push((&a.comps[i] * &b.comps[j]).scale(sign));
            }
        }
    }
    let comps = terms
        .into_iter()
        .map(|ts| {
            ts.into_iter()
                .reduce(|acc, t| &acc + &t)
                .unwrap_or_else(ScalarField::zero)
        })
        .collect();
    Ok(KForm::new(degree, comps))
}

/// Hodge dual of a form field. A sign-permuted recombination, so analytic
/// gradients survive.
pub fn hodge(f: &KForm) -> KForm {
    let table = &hodge_table().map[f.degree];
    let out_degree = 4 - f.degree;
    let mut comps: Vec<Option<ScalarField>> = vec![None; component_count(out_degree)];
    for (i, &(target, sign)) in table.iter().enumerate() {
        comps[target] = Some(f.comps[i].scale(sign));
    }
    KForm::new(out_degree, comps.into_iter().map(Option::unwrap).collect())
}

/// Hodge dual restricted to degree two, the anti-involution used for the
/// field strength.
pub fn hodge2(f: &KForm) -> Result<KForm> {
    if f.degree != 2 {
        return Err(Error::BadDegree {
            context: "degree-2 Hodge",
            degree: f.degree,
        });
    }
    Ok(hodge(f))
}

/// Insertion of a vector field into the first slot.
pub fn interior(x: &VectorField, w: &KForm) -> Result<KForm> {
    if w.degree == 0 {
        return Err(Error::BadDegree {
            context: "interior product",
            degree: 0,
        });
    }
    let out_degree = w.degree - 1;
    let mut comps = Vec::with_capacity(component_count(out_degree));
    for idx in basis_indices(out_degree) {
        let mut acc = ScalarField::zero();
        for a in 0..4 {
            if idx.contains(&a) {
                continue;
            }
            let below = idx.iter().filter(|&&j| j < a).count();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            let mut full: Vec<usize> = vec![a];
            full.extend_from_slice(idx);
            full.sort_unstable();
            let term = (x.component(a) * &w.comps[index_position(w.degree, &full)]).scale(sign);
            acc = &acc + &term;
        }
        comps.push(acc);
    }
    Ok(KForm::new(out_degree, comps))
}

/// Exterior derivative; components differentiate through the fields'
/// derivative path (analytic gradient or finite differences).
pub fn ext_d(w: &KForm) -> Result<KForm> {
    if w.degree >= 4 {
        return Err(Error::BadDegree {
            context: "exterior derivative",
            degree: w.degree,
        });
    }
    let out_degree = w.degree + 1;
    let mut comps = Vec::with_capacity(component_count(out_degree));
    for idx in basis_indices(out_degree) {
        let mut acc = ScalarField::zero();
        for (m, &a) in idx.iter().enumerate() {
            let rest: Vec<usize> = idx.iter().copied().filter(|&b| b != a).collect();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let term = w.comps[index_position(w.degree, &rest)]
                .partial_field(Axis::from_index(a))
                .scale(sign);
            acc = &acc + &term;
        }
        comps.push(acc);
    }
    Ok(KForm::new(out_degree, comps))
}

/// Codifferential on forms, the composite `* d *`.
pub fn codifferential(w: &KForm) -> Result<KForm> {
    Ok(hodge(&ext_d(&hodge(w))?))
}

/// Lie bracket of two vector fields.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let comp = |mu: usize| {
        let mut acc = ScalarField::zero();
        for nu in 0..4 {
            let forward = x.component(nu) * &y.component(mu).partial_field(Axis::from_index(nu));
            let backward = y.component(nu) * &x.component(mu).partial_field(Axis::from_index(nu));
            acc = &(&acc + &forward) - &backward;
        }
        acc
    };
    VectorField::from_components([comp(0), comp(1), comp(2), comp(3)])
}

/// Lie derivative of a form along a vector field via the homotopy identity
/// `i(X) d + d i(X)`.
pub fn lie_derivative_form(x: &VectorField, w: &KForm) -> Result<KForm> {
    if w.degree == 0 {
        return interior(x, &ext_d(w)?);
    }
    if w.degree == 4 {
        // top degree: only the d i(X) term contributes
        return ext_d(&interior(x, w)?);
    }
    let a = interior(x, &ext_d(w)?)?;
    let b = ext_d(&interior(x, w)?)?;
    Ok(a.add(&b))
}

/// Vector field metric-equivalent to a 1-form.
pub fn raise(alpha: &KForm) -> Result<VectorField> {
    if alpha.degree != 1 {
        return Err(Error::BadDegree {
            context: "index raising",
            degree: alpha.degree,
        });
    }
    Ok(VectorField::from_components([
        alpha.comps[0].scale(METRIC_DIAG[0]),
        alpha.comps[1].scale(METRIC_DIAG[1]),
        alpha.comps[2].scale(METRIC_DIAG[2]),
        alpha.comps[3].scale(METRIC_DIAG[3]),
    ]))
}

/// 1-form metric-equivalent to a vector field.
pub fn lower(x: &VectorField) -> KForm {
    KForm::one_form([
        x.component(0).scale(METRIC_DIAG[0]),
        x.component(1).scale(METRIC_DIAG[1]),
        x.component(2).scale(METRIC_DIAG[2]),
        x.component(3).scale(METRIC_DIAG[3]),
    ])
}

/// Raise one index of a (0,2)-value: `T_mu^nu = T_mu sigma eta^{sigma nu}`.
pub fn raise_second_index(t: Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            out[mu][nu] = t[mu][nu] * METRIC_DIAG[nu];
        }
    }
    out
}

/// Lower the contravariant index of a (1,1)-value: `T_{mu nu} = T_mu^sigma eta_{sigma nu}`.
pub fn lower_second_index(t: Mat4) -> Mat4 {
    raise_second_index(t)
}

/// Pairing of a 1-form value with a vector value.
pub fn pair(alpha: &FormValue, x: Vec4) -> f64 {
    assert_eq!(alpha.degree(), 1);
    (0..4).map(|i| alpha.comp(i) * x[i]).sum()
}

/// Raise a vector value to... lower it to covariant components.
pub fn lower_vec(x: Vec4) -> Vec4 {
    [
        METRIC_DIAG[0] * x[0],
        METRIC_DIAG[1] * x[1],
        METRIC_DIAG[2] * x[2],
        METRIC_DIAG[3] * x[3],
    ]
}

/// Full antisymmetric matrix of a degree-2 value.
pub fn two_form_matrix(f: &FormValue) -> Mat4 {
    assert_eq!(f.degree(), 2);
    let mut m = [[0.0; 4]; 4];
    for (pos, idx) in basis_indices(2).iter().enumerate() {
        m[idx[0]][idx[1]] = f.comp(pos);
        m[idx[1]][idx[0]] = -f.comp(pos);
    }
    m
}

/// Degree-2 value from a full antisymmetric matrix.
pub fn two_form_from_matrix(m: Mat4) -> FormValue {
    let comps = basis_indices(2)
        .iter()
        .map(|idx| m[idx[0]][idx[1]])
        .collect();
    FormValue::new(2, comps)
}
