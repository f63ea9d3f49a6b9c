//! Binary function optimization (BFOP) over `{0,1}` variables.
//!
//! An instance is a weighted sum of binary functions, each a 2×2 integer table
//! on a pair of distinct variables, plus unary functions. Separable binary
//! tables are split into unary parts at construction, so every stored binary
//! table is nonseparable.

mod reduce;

pub use reduce::{
    coordination_payoff, directed_cut_weight, hopfield_is_stable, hopfield_potential, read_wcnf, reduce_coordination,
    reduce_directed_cut, reduce_hopfield, reduce_max2sat, satisfied_weight, Clause, Literal,
};

use serde::{Deserialize, Serialize};

use crate::arcs::{find_arcs, Arc, MoveSequence};
use crate::error::{Error, Result};
use crate::flip::FlipSystem;
use crate::instance::{Configuration, DistributionSpec};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// `table[x][y] = f(x, y)`.
pub type Table2 = [[i64; 2]; 2];
pub type Table1 = [i64; 2];

/// `f(0,0) + f(1,1) == f(0,1) + f(1,0)`.
pub fn is_separable(t: &Table2) -> bool {
    t[0][0] + t[1][1] == t[0][1] + t[1][0]
}

/// Split a separable table into `f'(x) = f(0,0) + c x` and `f''(y) = d y`.
pub fn separate(t: &Table2) -> Result<(Table1, Table1)> {
    if !is_separable(t) {
        return Err(Error::Refused(format!("table {t:?} is not separable")));
    }
    let c = t[1][0] - t[0][0];
    let d = t[0][1] - t[0][0];
    Ok(([t[0][0], t[0][0] + c], [0, d]))
}

/// `f(0,0) + f(1,1) - f(0,1) - f(1,0)`, the magnitude of every nonzero arc-matrix entry.
pub fn interaction(t: &Table2) -> i64 {
    t[0][0] + t[1][1] - t[0][1] - t[1][0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryFn<W> {
    pub vars: [usize; 2],
    pub table: Table2,
    pub weight: W,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnaryFn<W> {
    pub var: usize,
    pub table: Table1,
    pub weight: W,
}

/// Per-variable value in `{0,1}`, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![0; n + 1])
    }

    /// `bits[i]` is the value of variable `i + 1`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::validation(format!("assignment value {b} not in {{0,1}}")));
        }
        let mut v = vec![0];
        v.extend_from_slice(bits);
        Ok(Assignment(v))
    }

    /// Bits of `mask` as the assignment of variables `1..=n`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut v = vec![0];
        v.extend((0..n).map(|i| ((mask >> i) & 1) as u8));
        Assignment(v)
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        use rand::Rng as _;
        let mut v = vec![0];
        v.extend((0..n).map(|_| rng.gen_range(0..=1u8)));
        Assignment(v)
    }

    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, x: usize) -> u8 {
        self.0[x]
    }

    pub fn set(&mut self, x: usize, b: u8) {
        self.0[x] = b;
    }

    pub fn flip(&mut self, x: usize) {
        self.0[x] ^= 1;
    }

    pub fn bits(&self) -> &[u8] {
        &self.0[1..]
    }

    /// `1 -> +1`, `0 -> -1`.
    pub fn to_configuration(&self) -> Configuration {
        Configuration::from_signs(&self.0[1..].iter().map(|&b| if b == 1 { 1 } else { -1 }).collect::<Vec<_>>())
            .expect("signs are +-1")
    }

    pub fn from_configuration(c: &Configuration) -> Result<Self> {
        Assignment::from_bits(&c.to_signs()?.iter().map(|&s| u8::from(s > 0)).collect::<Vec<_>>())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfopInstance<W> {
    n: usize,
    binary: Vec<BinaryFn<W>>,
    unary: Vec<UnaryFn<W>>,
    // indices of binary / unary functions touching each variable
    bin_of: Vec<Vec<usize>>,
    un_of: Vec<Vec<usize>>,
}

impl<W: Scalar> BfopInstance<W> {
    /// Validates variables and splits separable binary tables into unary parts.
    pub fn new(n: usize, binary: Vec<BinaryFn<W>>, unary: Vec<UnaryFn<W>>) -> Result<Self> {
        let check = |x: usize| {
            if x == 0 || x > n {
                Err(Error::Domain(x))
            } else {
                Ok(())
            }
        };
        let mut kept = Vec::with_capacity(binary.len());
        let mut unary = unary;
        for u in &unary {
            check(u.var)?;
        }
        for f in binary {
            let [x, y] = f.vars;
            check(x)?;
            check(y)?;
            if x == y {
                return Err(Error::validation(format!("binary function on repeated variable {x}")));
            }
            if is_separable(&f.table) {
                let (fx, fy) = separate(&f.table)?;
                unary.push(UnaryFn { var: x, table: fx, weight: f.weight.clone() });
                unary.push(UnaryFn { var: y, table: fy, weight: f.weight });
            } else {
                kept.push(f);
            }
        }
        let mut bin_of = vec![Vec::new(); n + 1];
        for (i, f) in kept.iter().enumerate() {
            bin_of[f.vars[0]].push(i);
            bin_of[f.vars[1]].push(i);
        }
        let mut un_of = vec![Vec::new(); n + 1];
        for (i, u) in unary.iter().enumerate() {
            un_of[u.var].push(i);
        }
        Ok(BfopInstance { n, binary: kept, unary, bin_of, un_of })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn binary(&self) -> &[BinaryFn<W>] {
        &self.binary
    }

    pub fn unary(&self) -> &[UnaryFn<W>] {
        &self.unary
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::validation(format!("assignment has {} variables, instance {}", a.n(), self.n)));
        }
        Ok(())
    }

    pub fn objective(&self, a: &Assignment) -> Result<W> {
        self.check_assignment(a)?;
        Ok(self.objective_unchecked(a))
    }

    fn objective_unchecked(&self, a: &Assignment) -> W {
        let mut total = W::zero();
        for f in &self.binary {
            let v = f.table[a.get(f.vars[0]) as usize][a.get(f.vars[1]) as usize];
            total = total + W::from_i64(v) * f.weight.clone();
        }
        for u in &self.unary {
            total = total + W::from_i64(u.table[a.get(u.var) as usize]) * u.weight.clone();
        }
        total
    }

    /// Objective change from flipping `x`, from the functions touching `x`.
    pub fn flip_gain(&self, a: &Assignment, x: usize) -> Result<W> {
        self.check_assignment(a)?;
        if x == 0 || x > self.n {
            return Err(Error::Domain(x));
        }
        Ok(self.gain_unchecked(a, x))
    }

    fn gain_unchecked(&self, a: &Assignment, x: usize) -> W {
        let b = a.get(x) as usize;
        let mut g = W::zero();
        for &i in &self.bin_of[x] {
            g = g + W::from_i64(binary_delta(&self.binary[i], a, x)) * self.binary[i].weight.clone();
        }
        for &i in &self.un_of[x] {
            let u = &self.unary[i];
            g = g + W::from_i64(u.table[1 - b] - u.table[b]) * u.weight.clone();
        }
        g
    }

    pub fn map_weights<V: Scalar>(&self, mut f: impl FnMut(&W) -> V) -> BfopInstance<V> {
        BfopInstance {
            n: self.n,
            binary: self
                .binary
                .iter()
                .map(|b| BinaryFn { vars: b.vars, table: b.table, weight: f(&b.weight) })
                .collect(),
            unary: self.unary.iter().map(|u| UnaryFn { var: u.var, table: u.table, weight: f(&u.weight) }).collect(),
            bin_of: self.bin_of.clone(),
            un_of: self.un_of.clone(),
        }
    }
}

impl BfopInstance<f64> {
    /// Replace every weight by an independent draw from `dist`.
    pub fn resample_weights(&self, dist: &DistributionSpec, rng: &mut Rng) -> Self {
        self.map_weights(|_| dist.sample(rng))
    }

    pub fn to_file(&self) -> BfopFile {
        BfopFile { n: self.n, binary: self.binary.clone(), unary: self.unary.clone() }
    }
}

/// Change of `f` when variable `x` (one of its pair) flips.
fn binary_delta<W>(f: &BinaryFn<W>, a: &Assignment, x: usize) -> i64 {
    let (xv, yv) = (a.get(f.vars[0]) as usize, a.get(f.vars[1]) as usize);
    if f.vars[0] == x {
        f.table[1 - xv][yv] - f.table[xv][yv]
    } else {
        f.table[xv][1 - yv] - f.table[xv][yv]
    }
}

/// JSON form: `{"n", "binary": [{"vars", "table", "weight"}], "unary": [{"var", "table", "weight"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfopFile {
    pub n: usize,
    #[serde(default)]
    pub binary: Vec<BinaryFn<f64>>,
    #[serde(default)]
    pub unary: Vec<UnaryFn<f64>>,
}

impl BfopFile {
    pub fn into_instance(self) -> Result<BfopInstance<f64>> {
        BfopInstance::new(self.n, self.binary, self.unary)
    }
}

/// FLIP on a BFOP: units are variables, state is an assignment.
pub struct Bfop<'a, W> {
    inst: &'a BfopInstance<W>,
}

impl<'a, W: Scalar> Bfop<'a, W> {
    pub fn new(inst: &'a BfopInstance<W>) -> Self {
        Bfop { inst }
    }
}

impl<W: Scalar> FlipSystem for Bfop<'_, W> {
    type Value = W;
    type State = Assignment;

    fn num_units(&self) -> usize {
        self.inst.n
    }
    fn objective(&self, state: &Assignment) -> W {
        self.inst.objective_unchecked(state)
    }
    fn gain(&self, state: &Assignment, v: usize) -> W {
        self.inst.gain_unchecked(state, v)
    }
    fn apply_flip(&self, state: &mut Assignment, v: usize) {
        state.flip(v);
    }
    fn dependents(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.inst.bin_of[v]
            .iter()
            .map(|&i| {
                let f = &self.inst.binary[i];
                if f.vars[0] == v {
                    f.vars[1]
                } else {
                    f.vars[0]
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Matrix with one row per (nonseparable) binary function and one column per
/// arc of `seq`: the unweighted value change of each function summed over the
/// arc's two endpoint moves, replaying from `init`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcMatrix {
    pub arcs: Vec<Arc>,
    /// `rows[i][j]`: function `i`, arc `j`.
    pub rows: Vec<Vec<i64>>,
}

impl ArcMatrix {
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn rank(&self) -> usize {
        crate::rank::rank_dense(&self.rows)
    }
}

pub fn bfop_arc_matrix<W: Scalar>(inst: &BfopInstance<W>, seq: &MoveSequence, init: &Assignment) -> Result<ArcMatrix> {
    if seq.n() != inst.n || init.n() != inst.n {
        return Err(Error::validation("sequence, assignment and instance disagree on the variable count"));
    }
    if let Some(f) = inst.binary.iter().find(|f| is_separable(&f.table)) {
        return Err(Error::validation(format!("unnormalized instance: separable table on {:?}", f.vars)));
    }
    // per-move delta vectors, replayed
    let mut a = init.clone();
    let mut deltas: Vec<Vec<(usize, i64)>> = vec![Vec::new()];
    for &x in seq.moves() {
        let d: Vec<(usize, i64)> = inst.bin_of[x].iter().map(|&i| (i, binary_delta(&inst.binary[i], &a, x))).collect();
        deltas.push(d);
        a.flip(x);
    }
    let arcs = find_arcs(seq);
    let mut rows = vec![vec![0i64; arcs.len()]; inst.binary.len()];
    for (j, arc) in arcs.iter().enumerate() {
        for &(i, v) in deltas[arc.left].iter().chain(&deltas[arc.right]) {
            rows[i][j] += v;
        }
    }
    Ok(ArcMatrix { arcs, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn all_boolean_tables() -> impl Iterator<Item = Table2> {
        (0..16u32).map(|b| [[(b & 1) as i64, (b >> 1 & 1) as i64], [(b >> 2 & 1) as i64, (b >> 3 & 1) as i64]])
    }

    fn brute_separable(t: &Table2) -> bool {
        // f(x,y) = g(x) + h(y) over the integers: fix h(0) = 0
        let g = [t[0][0], t[1][0]];
        let h = [0, t[0][1] - t[0][0]];
        (0..2).all(|x| (0..2).all(|y| t[x][y] == g[x] + h[y]))
    }

    #[test]
    fn six_boolean_tables_are_separable() {
        assert_eq!(all_boolean_tables().filter(is_separable).count(), 6);
        for t in all_boolean_tables() {
            assert_eq!(is_separable(&t), brute_separable(&t));
        }
    }

    #[test]
    fn xor_and_projection() {
        let xor = [[0, 1], [1, 0]];
        assert!(!is_separable(&xor));
        assert!(separate(&xor).is_err());
        let proj = [[0, 0], [1, 1]];
        assert_eq!(separate(&proj).unwrap(), ([0, 1], [0, 0]));
    }

    #[test]
    fn xor_objective_and_gain() {
        let inst = BfopInstance::new(2, vec![BinaryFn { vars: [1, 2], table: [[0, 1], [1, 0]], weight: 1.0 }], vec![])
            .unwrap();
        let a = Assignment::from_bits(&[0, 1]).unwrap();
        assert_eq!(inst.objective(&a).unwrap(), 1.0);
        assert_eq!(inst.flip_gain(&a, 1).unwrap(), -1.0);
        assert_eq!(inst.flip_gain(&a, 2).unwrap(), -1.0);
        let empty = BfopInstance::<f64>::new(3, vec![], vec![]).unwrap();
        assert_eq!(empty.objective(&Assignment::zeros(3)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_variables() {
        let f = |vars| BinaryFn { vars, table: [[0, 1], [1, 0]], weight: 1.0 };
        assert!(BfopInstance::new(2, vec![f([1, 1])], vec![]).is_err());
        assert!(BfopInstance::new(2, vec![f([1, 3])], vec![]).is_err());
    }

    #[test]
    fn and_table_entries_are_unit() {
        let inst = BfopInstance::new(2, vec![BinaryFn { vars: [1, 2], table: [[0, 0], [0, 1]], weight: 1.0 }], vec![])
            .unwrap();
        let seq = MoveSequence::new(2, vec![1, 2, 1, 2, 1]).unwrap();
        for mask in 0..4 {
            let m = bfop_arc_matrix(&inst, &seq, &Assignment::from_mask(2, mask)).unwrap();
            for row in &m.rows {
                assert!(row.iter().all(|&x| x.abs() == 1));
            }
        }
    }

    #[test]
    fn separable_rows_are_dropped() {
        let inst = BfopInstance::new(
            3,
            vec![
                BinaryFn { vars: [1, 2], table: [[0, 0], [1, 1]], weight: 2.0 },
                BinaryFn { vars: [2, 3], table: [[0, 1], [1, 0]], weight: 1.0 },
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(inst.binary().len(), 1);
        assert_eq!(inst.unary().len(), 2);
    }

    fn table_strategy() -> impl Strategy<Value = Table2> {
        prop::array::uniform2(prop::array::uniform2(-9i64..=9))
    }

    proptest! {
        #[test]
        fn separate_round_trip(t in table_strategy()) {
            if is_separable(&t) {
                let (f1, f2) = separate(&t).unwrap();
                for x in 0..2 {
                    for y in 0..2 {
                        prop_assert_eq!(t[x][y], f1[x] + f2[y]);
                    }
                }
            }
            prop_assert_eq!(is_separable(&t), brute_separable(&t));
        }

        #[test]
        fn local_gain_matches_recompute(seed in any::<u64>(), n in 2usize..8) {
            let mut rng = rng_from_seed(seed);
            use rand::Rng as _;
            let binary: Vec<BinaryFn<f64>> = (0..2 * n).map(|_| {
                let x = rng.gen_range(1..=n);
                let mut y = rng.gen_range(1..=n);
                while y == x { y = rng.gen_range(1..=n); }
                let mut t = [[0i64; 2]; 2];
                for r in &mut t { for c in r.iter_mut() { *c = rng.gen_range(-5..=5); } }
                BinaryFn { vars: [x, y], table: t, weight: rng.gen_range(-1.0..1.0) }
            }).collect();
            let inst = BfopInstance::new(n, binary, vec![]).unwrap();
            let exact = inst.map_weights(|&w| crate::scalar::exact_from_f64(w));
            let a = Assignment::random(n, &mut rng);
            for x in 1..=n {
                let mut b = a.clone();
                b.flip(x);
                let delta = exact.objective(&b).unwrap() - exact.objective(&a).unwrap();
                prop_assert_eq!(exact.flip_gain(&a, x).unwrap(), delta);
            }
        }

        #[test]
        fn matrix_entries_follow_interaction(seed in any::<u64>()) {
            use rand::Rng as _;
            let mut rng = rng_from_seed(seed);
            let n = 5;
            let binary: Vec<BinaryFn<f64>> = (0..6).map(|_| {
                let x = rng.gen_range(1..=n);
                let mut y = rng.gen_range(1..=n);
                while y == x { y = rng.gen_range(1..=n); }
                let mut t = [[0i64; 2]; 2];
                for r in &mut t { for c in r.iter_mut() { *c = rng.gen_range(-3..=3); } }
                BinaryFn { vars: [x, y], table: t, weight: 1.0 }
            }).collect();
            let inst = BfopInstance::new(n, binary, vec![]).unwrap();
            let seq = crate::generate::random_sequence(n, 30, &mut rng);
            let init = Assignment::random(n, &mut rng);
            let m = bfop_arc_matrix(&inst, &seq, &init).unwrap();
            for (i, f) in inst.binary().iter().enumerate() {
                for (j, a) in m.arcs.iter().enumerate() {
                    let other = if f.vars[0] == a.node { Some(f.vars[1]) } else if f.vars[1] == a.node { Some(f.vars[0]) } else { None };
                    let odd = other.is_some_and(|u| seq.count_in(u, a.left + 1, a.right - 1) % 2 == 1);
                    let e = m.rows[i][j];
                    if odd {
                        prop_assert_eq!(e.abs(), interaction(&f.table).abs());
                    } else {
                        prop_assert_eq!(e, 0);
                    }
                }
            }
            let other = Assignment::random(n, &mut rng);
            prop_assert_eq!(m.rank(), bfop_arc_matrix(&inst, &seq, &other).unwrap().rank());
        }
    }
}
