//! Fourier–Motzkin elimination shared by the exact symbolic and the
//! floating-point polytope code.
//!
//! Rows are kept in `a·x <= b` form. Equalities are used for Gaussian
//! substitution before any pairing. Pairwise combinations are filtered with
//! Chernikov's history rule, and after every step rows are pruned by
//! duplicate removal and by dominance against one other row or the sum of
//! two other rows.

use std::cmp::Ordering;

/// Arithmetic and certification hooks for one coefficient/constant domain.
pub(crate) trait Field {
    type C: Clone;
    type B: Clone;

    fn zero(&self) -> Self::C;
    /// Sign with the domain's tolerance: -1, 0 or 1.
    fn sign(&self, c: &Self::C) -> i8;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn div(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn neg(&self, a: &Self::C) -> Self::C;
    fn magnitude(&self, a: &Self::C) -> f64;

    fn b_zero(&self) -> Self::B;
    /// `ka * a + kb * b`.
    fn b_comb(&self, ka: &Self::C, a: &Self::B, kb: &Self::C, b: &Self::B) -> Self::B;
    /// Certified `a <= b`.
    fn b_le(&self, a: &Self::B, b: &Self::B) -> bool;
    fn b_eq(&self, a: &Self::B, b: &Self::B) -> bool;

    /// Rescales an inequality by a positive factor into a canonical shape.
    fn normalize(&self, a: &mut [Self::C], b: &mut Self::B);

    fn ge(&self, a: &Self::C, b: &Self::C) -> bool {
        self.sign(&self.add(a, &self.neg(b))) >= 0
    }

    fn same(&self, a: &Self::C, b: &Self::C) -> bool {
        self.sign(&self.add(a, &self.neg(b))) == 0
    }

    fn one(&self) -> Self::C;
}

/// Set of original row indices a derived row was combined from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct History(Vec<u64>);

impl History {
    fn single(i: usize) -> Self {
        let mut words = vec![0u64; i / 64 + 1];
        words[i / 64] |= 1 << (i % 64);
        History(words)
    }

    fn union(&self, other: &History) -> History {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.0.clone();
        for (w, o) in words.iter_mut().zip(&short.0) {
            *w |= o;
        }
        History(words)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b))
    }
}

pub(crate) struct Row<F: Field> {
    pub a: Vec<F::C>,
    pub b: F::B,
    hist: History,
}

impl<F: Field> Row<F> {
    /// Indices of the input rows this row was combined from.
    pub fn origins(&self) -> Vec<usize> {
        self.hist.members().collect()
    }
}

impl<F: Field> Clone for Row<F> {
    fn clone(&self) -> Self {
        Row {
            a: self.a.clone(),
            b: self.b.clone(),
            hist: self.hist.clone(),
        }
    }
}

pub(crate) struct EqRow<F: Field> {
    pub a: Vec<F::C>,
    pub b: F::B,
}

impl<F: Field> Clone for EqRow<F> {
    fn clone(&self) -> Self {
        EqRow {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }
}

/// A linear system under elimination.
pub(crate) struct System<F: Field> {
    pub rows: Vec<Row<F>>,
    pub eqs: Vec<EqRow<F>>,
    /// Columns known to be nonnegative on the feasible set.
    pub nonneg: Vec<bool>,
    /// Constants `b` of rows `0 <= b` that could not be certified.
    pub residual: Vec<F::B>,
    steps: usize,
}

impl<F: Field> System<F> {
    pub fn new(field: &F, rows: Vec<(Vec<F::C>, F::B)>, eqs: Vec<(Vec<F::C>, F::B)>) -> Self {
        let width = rows.first().map(|r| r.0.len()).or(eqs.first().map(|e| e.0.len())).unwrap_or(0);
        let mut nonneg = vec![false; width];
        for (a, b) in &rows {
            // -x_j <= 0
            let nz: Vec<usize> = (0..a.len()).filter(|&j| field.sign(&a[j]) != 0).collect();
            if nz.len() == 1 && field.sign(&a[nz[0]]) < 0 && field.b_eq(b, &field.b_zero()) {
                nonneg[nz[0]] = true;
            }
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| Row {
                a,
                b,
                hist: History::single(i),
            })
            .collect();
        let eqs = eqs.into_iter().map(|(a, b)| EqRow { a, b }).collect();
        System {
            rows,
            eqs,
            nonneg,
            residual: Vec::new(),
            steps: 0,
        }
    }

    /// Projects out column `v`.
    pub fn eliminate(&mut self, field: &F, v: usize) {
        if let Some(pos) = self.eqs.iter().position(|e| field.sign(&e.a[v]) != 0) {
            let pivot = self.eqs.remove(pos);
            for row in &mut self.rows {
                substitute(field, &mut row.a, &mut row.b, &pivot, v);
            }
            for eq in &mut self.eqs {
                substitute(field, &mut eq.a, &mut eq.b, &pivot, v);
            }
            self.prune(field);
            return;
        }
        self.steps += 1;
        let limit = self.steps + 1;
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for row in self.rows.drain(..) {
            match field.sign(&row.a[v]) {
                1 => pos.push(row),
                -1 => neg.push(row),
                _ => rest.push(row),
            }
        }
        for p in &pos {
            for n in &neg {
                let hist = p.hist.union(&n.hist);
                if hist.len() > limit {
                    continue;
                }
                let kp = field.neg(&n.a[v]);
                let kn = p.a[v].clone();
                let mut a: Vec<F::C> = p
                    .a
                    .iter()
                    .zip(&n.a)
                    .map(|(x, y)| field.add(&field.mul(&kp, x), &field.mul(&kn, y)))
                    .collect();
                a[v] = field.zero();
                let b = field.b_comb(&kp, &p.b, &kn, &n.b);
                rest.push(Row { a, b, hist });
            }
        }
        self.rows = rest;
        self.prune(field);
    }

    /// Normalizes rows and removes rows that are implied by others.
    pub fn prune(&mut self, field: &F) {
        let mut rows: Vec<Row<F>> = Vec::with_capacity(self.rows.len());
        for mut row in self.rows.drain(..) {
            for c in row.a.iter_mut() {
                if field.sign(c) == 0 {
                    *c = field.zero();
                }
            }
            if row.a.iter().all(|c| field.sign(c) == 0) {
                if !field.b_le(&field.b_zero(), &row.b)
                    && !self.residual.iter().any(|r| field.b_eq(r, &row.b))
                {
                    self.residual.push(row.b);
                }
                continue;
            }
            field.normalize(&mut row.a, &mut row.b);
            let duplicate = rows.iter().any(|k| {
                k.a.iter().zip(&row.a).all(|(x, y)| field.same(x, y)) && field.b_eq(&k.b, &row.b)
            });
            if !duplicate {
                rows.push(row);
            }
        }

        // Try to drop rows with the most involved left-hand sides first.
        let complexity = |r: &Row<F>| {
            let nz = r.a.iter().filter(|c| field.sign(c) != 0).count();
            let mass: f64 = r.a.iter().map(|c| field.magnitude(c)).sum();
            (nz, mass)
        };
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&i, &j| {
            let (ni, mi) = complexity(&rows[i]);
            let (nj, mj) = complexity(&rows[j]);
            nj.cmp(&ni).then(mj.partial_cmp(&mi).unwrap_or(Ordering::Equal))
        });

        let mut kept = vec![true; rows.len()];
        for &r in &order {
            let others: Vec<usize> = (0..rows.len()).filter(|&s| s != r && kept[s]).collect();
            let single = others
                .iter()
                .any(|&s| self.covers(field, &rows[s].a, &rows[r].a) && field.b_le(&rows[s].b, &rows[r].b));
            if single {
                kept[r] = false;
                continue;
            }
            'pairs: for (x, &s) in others.iter().enumerate() {
                for &t in &others[x + 1..] {
                    let sum: Vec<F::C> = rows[s].a.iter().zip(&rows[t].a).map(|(p, q)| field.add(p, q)).collect();
                    if !self.covers(field, &sum, &rows[r].a) {
                        continue;
                    }
                    let one = field.one();
                    let b = field.b_comb(&one, &rows[s].b, &one, &rows[t].b);
                    if field.b_le(&b, &rows[r].b) {
                        kept[r] = false;
                        break 'pairs;
                    }
                }
            }
        }
        self.rows = rows
            .into_iter()
            .zip(kept)
            .filter_map(|(row, k)| k.then_some(row))
            .collect();
    }

    /// `s·x >= r·x` for every feasible `x`, judged column by column.
    fn covers(&self, field: &F, s: &[F::C], r: &[F::C]) -> bool {
        s.iter().zip(r).zip(&self.nonneg).all(|((x, y), &nn)| {
            if nn {
                field.ge(x, y)
            } else {
                field.same(x, y)
            }
        })
    }
}

fn substitute<F: Field>(field: &F, a: &mut [F::C], b: &mut F::B, pivot: &EqRow<F>, v: usize) {
    if field.sign(&a[v]) == 0 {
        return;
    }
    let k = field.div(&a[v], &pivot.a[v]);
    for (x, p) in a.iter_mut().zip(&pivot.a) {
        *x = field.add(x, &field.neg(&field.mul(&k, p)));
    }
    a[v] = field.zero();
    *b = field.b_comb(&field.one(), b, &field.neg(&k), &pivot.b);
}

/// Floating-point field used for instantiated polytopes.
pub(crate) struct Numeric {
    pub tol: f64,
}

impl Field for Numeric {
    type C = f64;
    type B = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn sign(&self, c: &f64) -> i8 {
        if *c > self.tol {
            1
        } else if *c < -self.tol {
            -1
        } else {
            0
        }
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn div(&self, a: &f64, b: &f64) -> f64 {
        a / b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn magnitude(&self, a: &f64) -> f64 {
        a.abs()
    }
    fn b_zero(&self) -> f64 {
        0.0
    }
    fn b_comb(&self, ka: &f64, a: &f64, kb: &f64, b: &f64) -> f64 {
        ka * a + kb * b
    }
    fn b_le(&self, a: &f64, b: &f64) -> bool {
        *a <= *b + self.tol * (1.0 + b.abs())
    }
    fn b_eq(&self, a: &f64, b: &f64) -> bool {
        (a - b).abs() <= self.tol * (1.0 + a.abs().max(b.abs()))
    }
    fn normalize(&self, a: &mut [f64], b: &mut f64) {
        let m = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if m > 0.0 {
            a.iter_mut().for_each(|x| *x /= m);
            *b /= m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(rows: Vec<(Vec<f64>, f64)>) -> System<Numeric> {
        System::new(&Numeric { tol: 1e-12 }, rows, vec![])
    }

    #[test]
    fn one_pairing_each() {
        // rho >= a (a = 1), R + rho <= b (b = 3), rho >= 0, R >= 0
        let f = Numeric { tol: 1e-12 };
        let mut s = sys(vec![
            (vec![0.0, -1.0], -1.0),
            (vec![1.0, 1.0], 3.0),
            (vec![0.0, -1.0], 0.0),
            (vec![-1.0, 0.0], 0.0),
        ]);
        s.eliminate(&f, 1);
        let mut rows: Vec<(f64, f64)> = s.rows.iter().map(|r| (r.a[0], r.b)).collect();
        rows.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // R <= 3 is dominated by R <= 2.
        assert_eq!(rows, vec![(-1.0, 0.0), (1.0, 2.0)]);
    }

    #[test]
    fn equality_substitution() {
        // x = y + 1, x <= 3  ->  y <= 2
        let f = Numeric { tol: 1e-12 };
        let mut s = System::new(&f, vec![(vec![1.0, 0.0], 3.0)], vec![(vec![1.0, -1.0], 1.0)]);
        s.eliminate(&f, 0);
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rows[0].a, vec![0.0, 1.0]);
        assert_eq!(s.rows[0].b, 2.0);
    }

    #[test]
    fn infeasible_residual() {
        // x <= 0 and x >= 1 leave 0 <= -1.
        let f = Numeric { tol: 1e-12 };
        let mut s = sys(vec![(vec![1.0], 0.0), (vec![-1.0], -1.0)]);
        s.eliminate(&f, 0);
        assert_eq!(s.residual, vec![-1.0]);
    }

    #[test]
    fn history_union_counts() {
        let h = History::single(3).union(&History::single(70));
        assert_eq!(h.len(), 2);
        assert_eq!(h.union(&History::single(3)).len(), 2);
    }
}
