//! Clifford tableaux: images of X_(i) and Z_(i) under conjugation.

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{symplectic_vec, Letter, SignedPauli, XorBasis};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CliffordTableau {
    n: usize,
    img_x: Vec<SignedPauli>,
    img_z: Vec<SignedPauli>,
}

/// A generator slot of the tableau.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Row {
    X(usize),
    Z(usize),
}

/// Conjugation of a Pauli by one Clifford gate: g P g†.
pub fn conjugate_by_gate(p: &SignedPauli, g: &Gate) -> SignedPauli {
    let n = p.n();
    let single = |q: usize, table: [(Letter, bool); 3]| -> SignedPauli {
        let l = p.letter(q);
        let (nl, flip) = match l {
            Letter::I => return *p,
            Letter::X => table[0],
            Letter::Y => table[1],
            Letter::Z => table[2],
        };
        let (bx, bz) = nl.bits();
        let mask = 1u32 << q;
        let x = (p.x_bits() & !mask) | ((bx as u32) << q);
        let z = (p.z_bits() & !mask) | ((bz as u32) << q);
        SignedPauli::from_bits(n, x, z, p.is_negative() ^ flip)
    };
    use Letter::*;
    match *g {
        Gate::H(q) => single(q, [(Z, false), (Y, true), (X, false)]),
        Gate::S(q) => single(q, [(Y, false), (X, true), (Z, false)]),
        Gate::Sdg(q) => single(q, [(Y, true), (X, false), (Z, false)]),
        Gate::X(q) => single(q, [(X, false), (Y, true), (Z, true)]),
        Gate::Y(q) => single(q, [(X, true), (Y, false), (Z, true)]),
        Gate::Z(q) => single(q, [(X, true), (Y, true), (Z, false)]),
        Gate::Cnot(c, t) => {
            let bit = |v: u32, q: usize| (v >> q) & 1;
            let (x, z) = (p.x_bits(), p.z_bits());
            let (xc, zc, xt, zt) = (bit(x, c), bit(z, c), bit(x, t), bit(z, t));
            let flip = (xc & zt & (xt ^ zc ^ 1)) == 1;
            let nx = x ^ (xc << t);
            let nz = z ^ (zt << c);
            SignedPauli::from_bits(n, nx, nz, p.is_negative() ^ flip)
        }
        Gate::T(_) | Gate::Tdg(_) => panic!("T gates are not Clifford"),
    }
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            img_x: (0..n).map(|q| SignedPauli::x_q(n, q)).collect(),
            img_z: (0..n).map(|q| SignedPauli::z_q(n, q)).collect(),
        }
    }

    pub fn from_images(img_x: Vec<SignedPauli>, img_z: Vec<SignedPauli>) -> Result<Self> {
        let n = img_x.len();
        if img_z.len() != n {
            return Err(Error::QubitMismatch(n, img_z.len()));
        }
        if let Some(p) = img_x.iter().chain(img_z.iter()).find(|p| p.n() != n) {
            return Err(Error::QubitMismatch(n, p.n()));
        }
        let t = Self { n, img_x, img_z };
        if !t.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn img_x(&self, q: usize) -> SignedPauli {
        self.img_x[q]
    }

    pub fn img_z(&self, q: usize) -> SignedPauli {
        self.img_z[q]
    }

    pub fn image(&self, r: Row) -> SignedPauli {
        match r {
            Row::X(q) => self.img_x[q],
            Row::Z(q) => self.img_z[q],
        }
    }

    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let want = i == j;
                if self.img_x[i].anticommutes(&self.img_z[j]) != want {
                    return false;
                }
                if i < j
                    && (self.img_x[i].anticommutes(&self.img_x[j])
                        || self.img_z[i].anticommutes(&self.img_z[j]))
                {
                    return false;
                }
            }
        }
        self.img_x
            .iter()
            .chain(self.img_z.iter())
            .all(|p| !p.is_identity())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// C P C†.
    pub fn conjugate(&self, p: &SignedPauli) -> SignedPauli {
        assert_eq!(p.n(), self.n, "qubit count mismatch");
        let (mut e, mut x, mut z) = (p.raw_phase(), 0u32, 0u32);
        for q in 0..self.n {
            if (p.x_bits() >> q) & 1 == 1 {
                let g = &self.img_x[q];
                (e, x, z) = SignedPauli::raw_mul(e, x, z, g.raw_phase(), g.x_bits(), g.z_bits());
            }
        }
        for q in 0..self.n {
            if (p.z_bits() >> q) & 1 == 1 {
                let g = &self.img_z[q];
                (e, x, z) = SignedPauli::raw_mul(e, x, z, g.raw_phase(), g.x_bits(), g.z_bits());
            }
        }
        SignedPauli::from_raw(self.n, x, z, e).expect("Clifford image of a Hermitian Pauli")
    }

    /// Operator product a·b (b acts first).
    pub fn compose(a: &Self, b: &Self) -> Self {
        assert_eq!(a.n, b.n, "qubit count mismatch");
        Self {
            n: a.n,
            img_x: b.img_x.iter().map(|p| a.conjugate(p)).collect(),
            img_z: b.img_z.iter().map(|p| a.conjugate(p)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n;
        // The x_j (z_j) component of C† P C is the symplectic product of P
        // with C Z_j C† (C X_j C†); the sign is fixed by conjugating back.
        let pre = |p: &SignedPauli| -> SignedPauli {
            let mut x = 0u32;
            let mut z = 0u32;
            for j in 0..n {
                x |= (p.anticommutes(&self.img_z[j]) as u32) << j;
                z |= (p.anticommutes(&self.img_x[j]) as u32) << j;
            }
            let q = SignedPauli::from_bits(n, x, z, false);
            let back = self.conjugate(&q);
            debug_assert_eq!(back.unsigned(), p.unsigned());
            q.with_sign(back.is_negative() != p.is_negative())
        };
        Self {
            n,
            img_x: (0..n).map(|q| pre(&SignedPauli::x_q(n, q))).collect(),
            img_z: (0..n).map(|q| pre(&SignedPauli::z_q(n, q))).collect(),
        }
    }

    /// Left-multiplies by a gate: C ← G C.
    pub fn apply_gate(&mut self, g: &Gate) {
        for p in self.img_x.iter_mut().chain(self.img_z.iter_mut()) {
            *p = conjugate_by_gate(p, g);
        }
    }

    /// Tableau of a Clifford circuit (gates in time order).
    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let mut t = Self::identity(c.n());
        for g in c.gates() {
            if !g.is_clifford() {
                return Err(Error::Invalid("circuit contains T gates".into()));
            }
            t.apply_gate(g);
        }
        Ok(t)
    }

    /// Uniformly random tableau (signs included).
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut fixed: Vec<(Row, SignedPauli)> = Vec::with_capacity(2 * n);
        let mut basis = XorBasis::default();
        let dim = 1usize << (2 * n);
        for q in 0..n {
            for row in [Row::X(q), Row::Z(q)] {
                loop {
                    let idx = rng.gen_range(1..dim);
                    let cand = SignedPauli::from_index(n, idx).with_sign(rng.gen());
                    if basis.contains(symplectic_vec(&cand)) {
                        continue;
                    }
                    if fixed
                        .iter()
                        .all(|(r, p)| cand.anticommutes(p) == partners(*r, row))
                    {
                        basis.insert(symplectic_vec(&cand));
                        fixed.push((row, cand));
                        break;
                    }
                }
            }
        }
        Self::from_rows(n, &fixed)
    }

    fn from_rows(n: usize, rows: &[(Row, SignedPauli)]) -> Self {
        let mut img_x = vec![SignedPauli::identity(n); n];
        let mut img_z = vec![SignedPauli::identity(n); n];
        for (r, p) in rows {
            match *r {
                Row::X(q) => img_x[q] = *p,
                Row::Z(q) => img_z[q] = *p,
            }
        }
        Self { n, img_x, img_z }
    }

    /// Extends a partial assignment of rows to a full tableau. Open rows are
    /// filled in the order X(0), Z(0), X(1), ... with the lowest-index
    /// unsigned Pauli that satisfies every commutation relation and stays
    /// independent of the rows chosen so far.
    pub fn complete(n: usize, fixed: &[(Row, SignedPauli)]) -> Result<Self> {
        Self::complete_with(n, fixed, Completion::LowestIndex)
    }

    pub fn complete_with(n: usize, fixed: &[(Row, SignedPauli)], rule: Completion) -> Result<Self> {
        let mut rows: Vec<(Row, SignedPauli)> = Vec::with_capacity(2 * n);
        let mut basis = XorBasis::default();
        for (i, (r, p)) in fixed.iter().enumerate() {
            if p.n() != n {
                return Err(Error::QubitMismatch(n, p.n()));
            }
            if fixed[..i].iter().any(|(r2, _)| r2 == r) {
                return Err(Error::Invalid("row fixed twice".into()));
            }
            if rows.iter().any(|(r2, p2)| p.anticommutes(p2) != partners(*r, *r2)) {
                return Err(Error::NotSymplectic);
            }
            if !basis.insert(symplectic_vec(p)) {
                return Err(Error::NotSymplectic);
            }
            rows.push((*r, *p));
        }
        let dim = 1usize << (2 * n);
        for q in 0..n {
            for row in [Row::X(q), Row::Z(q)] {
                if rows.iter().any(|(r, _)| *r == row) {
                    continue;
                }
                let trivial = match row {
                    Row::X(q) => SignedPauli::x_q(n, q),
                    Row::Z(q) => SignedPauli::z_q(n, q),
                };
                let first = match rule {
                    Completion::LowestIndex => None,
                    Completion::PreferTrivial => Some(trivial),
                };
                let cand = first
                    .into_iter()
                    .chain((1..dim).map(|idx| SignedPauli::from_index(n, idx)))
                    .find(|c| {
                        !basis.contains(symplectic_vec(c))
                            && rows
                                .iter()
                                .all(|(r, p)| c.anticommutes(p) == partners(*r, row))
                    })
                    .ok_or(Error::NotSymplectic)?;
                basis.insert(symplectic_vec(&cand));
                rows.push((row, cand));
            }
        }
        Ok(Self::from_rows(n, &rows))
    }

    /// Images as Pauli strings: X rows, then Z rows.
    pub fn to_strings(&self) -> Vec<String> {
        self.img_x
            .iter()
            .chain(self.img_z.iter())
            .map(|p| p.to_string())
            .collect()
    }

    pub fn from_strings(strs: &[String]) -> Result<Self> {
        if !strs.len().is_multiple_of(2) {
            return Err(Error::Parse("tableau needs 2n Pauli strings".into()));
        }
        let n = strs.len() / 2;
        let ps = strs
            .iter()
            .map(|s| s.parse::<SignedPauli>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(ps[..n].to_vec(), ps[n..].to_vec())
    }
}

/// How [`CliffordTableau::complete_with`] fills open rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Completion {
    /// Lowest-index admissible Pauli.
    LowestIndex,
    /// The row's own generator (X_(q) or Z_(q)) when admissible, otherwise
    /// the lowest-index admissible Pauli.
    PreferTrivial,
}

/// Whether two tableau rows must anticommute.
fn partners(a: Row, b: Row) -> bool {
    matches!((a, b), (Row::X(i), Row::Z(j)) | (Row::Z(i), Row::X(j)) if i == j)
}

pub fn conjugate(c: &CliffordTableau, p: &SignedPauli) -> SignedPauli {
    c.conjugate(p)
}

/// Gates mapping a non-identity Pauli to ±Z on its lowest support qubit.
fn to_z_normal_form(p: &SignedPauli) -> (Vec<Gate>, usize) {
    let n = p.n();
    let mut gates = Vec::new();
    for q in 0..n {
        match p.letter(q) {
            Letter::X => gates.push(Gate::H(q)),
            Letter::Y => {
                gates.push(Gate::Sdg(q));
                gates.push(Gate::H(q));
            }
            _ => {}
        }
    }
    let pivot = p.support().trailing_zeros() as usize;
    for q in pivot + 1..n {
        if (p.support() >> q) & 1 == 1 {
            gates.push(Gate::Cnot(q, pivot));
        }
    }
    (gates, pivot)
}

/// A Clifford C with C P C† = P', with a circuit over {H, S, S†, CNOT, X}.
pub fn find_clifford_mapping(
    p: &SignedPauli,
    p2: &SignedPauli,
) -> Result<(CliffordTableau, Circuit)> {
    if p.n() != p2.n() {
        return Err(Error::QubitMismatch(p.n(), p2.n()));
    }
    if p.is_identity() || p2.is_identity() {
        return Err(Error::IdentityPauli);
    }
    let n = p.n();
    let (ga, pa) = to_z_normal_form(p);
    let (gb, pb) = to_z_normal_form(p2);
    let mut gates = ga;
    if pa != pb {
        gates.extend([Gate::Cnot(pa, pb), Gate::Cnot(pb, pa), Gate::Cnot(pa, pb)]);
    }
    let mut img = *p;
    for g in &gates {
        img = conjugate_by_gate(&img, g);
    }
    let mut target = *p2;
    for g in &gb {
        target = conjugate_by_gate(&target, g);
    }
    if img.is_negative() != target.is_negative() {
        gates.push(Gate::X(pb));
    }
    gates.extend(gb.iter().rev().map(|g| g.inverse()));
    let circuit = Circuit::new(n, gates)?;
    let tab = CliffordTableau::from_circuit(&circuit)?;
    debug_assert_eq!(tab.conjugate(p), *p2);
    Ok((tab, circuit))
}

/// The 2(4^n−1)·4^n coset leaders for qubit q: one tableau per signed image
/// pair (C Z_(q) C†, C X_(q) C†), other rows completed greedily.
pub fn enumerate_coset_leaders(n: usize, q: usize) -> Result<Vec<CliffordTableau>> {
    enumerate_coset_leaders_with(n, q, Completion::PreferTrivial)
}

pub fn enumerate_coset_leaders_with(n: usize, q: usize, rule: Completion) -> Result<Vec<CliffordTableau>> {
    if q >= n {
        return Err(Error::QubitOutOfRange(q, n));
    }
    let dim = 1usize << (2 * n);
    let mut out = Vec::with_capacity(2 * (dim - 1) * dim);
    for pi in 1..dim {
        for qi in 1..dim {
            let pz = SignedPauli::from_index(n, pi);
            let px = SignedPauli::from_index(n, qi);
            if !pz.anticommutes(&px) {
                continue;
            }
            // Signs do not influence the choice of the other rows.
            let base = CliffordTableau::complete_with(n, &[(Row::Z(q), pz), (Row::X(q), px)], rule)?;
            for sz in [false, true] {
                for sx in [false, true] {
                    let mut t = base.clone();
                    t.img_z[q] = pz.with_sign(sz);
                    t.img_x[q] = px.with_sign(sx);
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

/// Every n-qubit Clifford modulo phase (n ≤ 2).
pub fn enumerate_cliffords(n: usize) -> Result<Vec<CliffordTableau>> {
    if n > 2 {
        return Err(Error::Invalid("exhaustive Clifford enumeration needs n ≤ 2".into()));
    }
    let order: Vec<Row> = (0..n).flat_map(|q| [Row::X(q), Row::Z(q)]).collect();
    let mut out = Vec::new();
    let mut rows: Vec<(Row, SignedPauli)> = Vec::new();
    fn rec(
        n: usize,
        order: &[Row],
        rows: &mut Vec<(Row, SignedPauli)>,
        basis: &XorBasis,
        out: &mut Vec<CliffordTableau>,
    ) {
        let Some(&row) = order.get(rows.len()) else {
            out.push(CliffordTableau::from_rows(n, rows));
            return;
        };
        for idx in 1..(1usize << (2 * n)) {
            let c = SignedPauli::from_index(n, idx);
            if basis.contains(symplectic_vec(&c)) {
                continue;
            }
            if !rows.iter().all(|(r, p)| c.anticommutes(p) == partners(*r, row)) {
                continue;
            }
            let mut b2 = basis.clone();
            b2.insert(symplectic_vec(&c));
            for neg in [false, true] {
                rows.push((row, c.with_sign(neg)));
                rec(n, order, rows, &b2, out);
                rows.pop();
            }
        }
    }
    rec(n, &order, &mut rows, &XorBasis::default(), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SignedPauli {
        s.parse().unwrap()
    }

    #[test]
    fn gate_conjugation_examples() {
        assert_eq!(conjugate_by_gate(&p("Z"), &Gate::H(0)), p("X"));
        assert_eq!(conjugate_by_gate(&p("X"), &Gate::S(0)), p("Y"));
        assert_eq!(conjugate_by_gate(&p("XZ"), &Gate::Cnot(0, 1)), p("-YY"));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = rand::thread_rng();
        for n in 1..=3 {
            for _ in 0..20 {
                let t = CliffordTableau::random(n, &mut rng);
                assert!(t.is_symplectic());
                let i = t.inverse();
                assert!(CliffordTableau::compose(&t, &i).is_identity());
                assert!(CliffordTableau::compose(&i, &t).is_identity());
            }
        }
    }

    #[test]
    fn mapping_examples() {
        let (t, c) = find_clifford_mapping(&p("Z"), &p("X")).unwrap();
        assert_eq!(c.gates(), &[Gate::H(0)]);
        assert_eq!(t.conjugate(&p("Z")), p("X"));
        let (t, c) = find_clifford_mapping(&p("Z"), &p("Z")).unwrap();
        assert!(t.is_identity() && c.gates().is_empty());
        let (t, c) = find_clifford_mapping(&p("ZI"), &p("IZ")).unwrap();
        assert_eq!(t.conjugate(&p("ZI")), p("IZ"));
        assert_eq!(c.gates().iter().filter(|g| matches!(g, Gate::Cnot(..))).count(), 3);
        assert!(find_clifford_mapping(&p("II"), &p("IZ")).is_err());
    }

    #[test]
    fn leader_counts() {
        assert_eq!(enumerate_coset_leaders(1, 0).unwrap().len(), 24);
        let l2 = enumerate_coset_leaders(2, 1).unwrap();
        assert_eq!(l2.len(), 480);
        assert!(l2.iter().all(|t| t.is_symplectic()));
        assert!(enumerate_coset_leaders(2, 2).is_err());
    }

    #[test]
    fn clifford_counts() {
        assert_eq!(enumerate_cliffords(1).unwrap().len(), 24);
        assert_eq!(enumerate_cliffords(2).unwrap().len(), 11520);
    }

    #[test]
    fn completion_respects_fixed_rows() {
        let t = CliffordTableau::complete(2, &[(Row::Z(0), p("ZZ")), (Row::Z(1), p("XX"))]).unwrap();
        assert!(t.is_symplectic());
        assert_eq!(t.img_z(0), p("ZZ"));
        assert_eq!(t.img_z(1), p("XX"));
    }
}
