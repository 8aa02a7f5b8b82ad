//! Regular LDPC codes: construction, alist I/O, syndrome checks and encoding.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A regular `(dv, dc)` LDPC code given by the Tanner graph of its parity-check matrix.
///
/// Adjacency lists are kept sorted, so two codes with the same parity-check
/// matrix compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdpcCode {
    n: usize,
    m: usize,
    dv: usize,
    dc: usize,
    var_checks: Vec<Vec<usize>>,
    check_vars: Vec<Vec<usize>>,
    // Edges are numbered check-major: edge `c * dc + k` joins check `c` and
    // variable `check_vars[c][k]`.
    edge_var: Vec<u32>,
    var_edges: Vec<u32>,
}

/// Options for [`LdpcCode::generate_regular_with`].
#[derive(Debug, Clone, Copy)]
pub struct ConstructionOptions {
    /// Number of fresh socket permutations tried before giving up.
    pub retries: usize,
    /// Edge-swap attempts per permutation spent on repairing duplicate edges and 4-cycles.
    pub repair_swaps: usize,
    /// Whether to spend repair swaps on 4-cycles (duplicates are always repaired).
    pub avoid_four_cycles: bool,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions {
            retries: 20,
            repair_swaps: 200_000,
            avoid_four_cycles: true,
        }
    }
}

impl LdpcCode {
    /// Builds a code from per-check variable lists, validating regularity.
    pub fn from_check_lists(n: usize, check_vars: Vec<Vec<usize>>) -> Result<Self> {
        let m = check_vars.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidCode("empty code".into()));
        }
        let dc = check_vars[0].len();
        let mut var_checks = vec![Vec::new(); n];
        let mut sorted = Vec::with_capacity(m);
        for (c, vars) in check_vars.into_iter().enumerate() {
            if vars.len() != dc {
                return Err(Error::InvalidCode(format!(
                    "check {c} has degree {}, expected {dc}",
                    vars.len()
                )));
            }
            let mut vars = vars;
            vars.sort_unstable();
            for w in vars.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidCode(format!(
                        "duplicate edge between check {c} and variable {}",
                        w[0]
                    )));
                }
            }
            for &v in &vars {
                if v >= n {
                    return Err(Error::InvalidCode(format!(
                        "check {c} references variable {v} >= n = {n}"
                    )));
                }
                var_checks[v].push(c);
            }
            sorted.push(vars);
        }
        let dv = var_checks[0].len();
        if let Some(v) = var_checks.iter().position(|cs| cs.len() != dv) {
            return Err(Error::InvalidCode(format!(
                "variable {v} has degree {}, expected {dv}",
                var_checks[v].len()
            )));
        }
        if dv == 0 {
            return Err(Error::InvalidCode("variable degree is zero".into()));
        }
        Ok(Self::assemble(n, dv, dc, var_checks, sorted))
    }

    fn assemble(
        n: usize,
        dv: usize,
        dc: usize,
        var_checks: Vec<Vec<usize>>,
        check_vars: Vec<Vec<usize>>,
    ) -> Self {
        let m = check_vars.len();
        let mut edge_var = Vec::with_capacity(m * dc);
        let mut var_edges = vec![0u32; n * dv];
        let mut fill = vec![0usize; n];
        for (c, vars) in check_vars.iter().enumerate() {
            for (k, &v) in vars.iter().enumerate() {
                let e = c * dc + k;
                edge_var.push(v as u32);
                var_edges[v * dv + fill[v]] = e as u32;
                fill[v] += 1;
            }
        }
        LdpcCode {
            n,
            m,
            dv,
            dc,
            var_checks,
            check_vars,
            edge_var,
            var_edges,
        }
    }

    /// Random regular code from a socket permutation with duplicate-edge
    /// rejection and best-effort 4-cycle removal.
    pub fn generate_regular(n: usize, dv: usize, dc: usize, seed: u64) -> Result<Self> {
        Self::generate_regular_with(n, dv, dc, seed, ConstructionOptions::default())
    }

    pub fn generate_regular_with(
        n: usize,
        dv: usize,
        dc: usize,
        seed: u64,
        opts: ConstructionOptions,
    ) -> Result<Self> {
        if n == 0 || dv == 0 || dc == 0 {
            return Err(Error::InvalidDegrees(format!(
                "n, dv and dc must be positive (n={n}, dv={dv}, dc={dc})"
            )));
        }
        if !(n * dv).is_multiple_of(dc) {
            return Err(Error::InvalidDegrees(format!(
                "n*dv = {} is not divisible by dc = {dc}",
                n * dv
            )));
        }
        if dc > n {
            return Err(Error::InvalidDegrees(format!("dc = {dc} exceeds n = {n}")));
        }
        let m = n * dv / dc;
        if dv > m {
            return Err(Error::InvalidDegrees(format!(
                "dv = {dv} exceeds the number of checks m = {m}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..opts.retries.max(1) {
            let mut sockets: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, dv)).collect();
            sockets.shuffle(&mut rng);
            let mut builder = GraphBuilder::new(n, dv, dc, &sockets);
            if builder.repair(&mut rng, opts) {
                let check_vars = builder.check_vars;
                return Self::from_check_lists(n, check_vars);
            }
        }
        Err(Error::ConstructionFailed(format!(
            "no duplicate-free ({dv},{dc}) graph with n={n} after {} permutations",
            opts.retries.max(1)
        )))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dv(&self) -> usize {
        self.dv
    }

    pub fn dc(&self) -> usize {
        self.dc
    }

    pub fn num_edges(&self) -> usize {
        self.n * self.dv
    }

    /// Design rate `1 - dv/dc`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.dv as f64 / self.dc as f64
    }

    pub fn var_checks(&self, v: usize) -> &[usize] {
        &self.var_checks[v]
    }

    pub fn check_vars(&self, c: usize) -> &[usize] {
        &self.check_vars[c]
    }

    /// Variable node attached to edge `e`.
    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e] as usize
    }

    /// Edge indices incident to variable `v`.
    #[inline]
    pub fn var_edges(&self, v: usize) -> &[u32] {
        &self.var_edges[v * self.dv..(v + 1) * self.dv]
    }

    /// Number of length-4 cycles (pairs of variables sharing two checks).
    pub fn count_four_cycles(&self) -> usize {
        let mut count = 0;
        let mut seen = vec![usize::MAX; self.n];
        let mut hits = vec![0usize; self.n];
        for v in 0..self.n {
            for &c in &self.var_checks[v] {
                for &u in &self.check_vars[c] {
                    if u <= v {
                        continue;
                    }
                    if seen[u] != v {
                        seen[u] = v;
                        hits[u] = 0;
                    }
                    hits[u] += 1;
                    if hits[u] >= 2 {
                        count += hits[u] - 1;
                    }
                }
            }
        }
        count
    }

    /// Serializes the code as alist text.
    pub fn to_alist(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m);
        let _ = writeln!(s, "{} {}", self.dv, self.dc);
        let _ = writeln!(s, "{}", join(std::iter::repeat_n(self.dv, self.n)));
        let _ = writeln!(s, "{}", join(std::iter::repeat_n(self.dc, self.m)));
        for checks in &self.var_checks {
            let _ = writeln!(s, "{}", join(checks.iter().map(|c| c + 1)));
        }
        for vars in &self.check_vars {
            let _ = writeln!(s, "{}", join(vars.iter().map(|v| v + 1)));
        }
        s
    }

    /// Parses alist text. Zero entries (padding used by some writers) are skipped.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate();
        let mut next_nums = |what: &str| -> Result<Vec<usize>> {
            let (i, line) = lines
                .next()
                .ok_or_else(|| Error::Alist(format!("unexpected end of input reading {what}")))?;
            line.split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| {
                        Error::Alist(format!("line {}: invalid integer {t:?} in {what}", i + 1))
                    })
                })
                .collect()
        };
        let header = next_nums("header")?;
        let [n, m] = header[..] else {
            return Err(Error::Alist("header must contain exactly n and m".into()));
        };
        let max_deg = next_nums("max degrees")?;
        if max_deg.len() != 2 {
            return Err(Error::Alist(
                "second line must contain two max degrees".into(),
            ));
        }
        let col_deg = next_nums("column degrees")?;
        let row_deg = next_nums("row degrees")?;
        if col_deg.len() != n || row_deg.len() != m {
            return Err(Error::Alist(format!(
                "degree lists have lengths {}/{}, expected {n}/{m}",
                col_deg.len(),
                row_deg.len()
            )));
        }
        let mut cols = Vec::with_capacity(n);
        for (j, &deg) in col_deg.iter().enumerate() {
            let entries: Vec<usize> = next_nums("column list")?
                .into_iter()
                .filter(|&x| x != 0)
                .collect();
            if entries.len() != deg {
                return Err(Error::Alist(format!(
                    "column {} lists {} entries but its degree is {deg}",
                    j + 1,
                    entries.len()
                )));
            }
            if let Some(&bad) = entries.iter().find(|&&r| r > m) {
                return Err(Error::Alist(format!(
                    "column {} references row {bad} > m = {m}",
                    j + 1
                )));
            }
            cols.push(entries);
        }
        let mut rows = Vec::with_capacity(m);
        for (i, &deg) in row_deg.iter().enumerate() {
            let entries: Vec<usize> = next_nums("row list")?
                .into_iter()
                .filter(|&x| x != 0)
                .collect();
            if entries.len() != deg {
                return Err(Error::Alist(format!(
                    "row {} lists {} entries but its degree is {deg}",
                    i + 1,
                    entries.len()
                )));
            }
            if let Some(&bad) = entries.iter().find(|&&c| c > n) {
                return Err(Error::Alist(format!(
                    "row {} references column {bad} > n = {n}",
                    i + 1
                )));
            }
            rows.push(entries.into_iter().map(|c| c - 1).collect::<Vec<_>>());
        }
        // Column lists must describe the same matrix as the row lists.
        let mut from_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, r) in rows.iter().enumerate() {
            for &c in r {
                from_rows[c].push(i);
            }
        }
        for (j, col) in cols.iter().enumerate() {
            let mut a: Vec<usize> = col.iter().map(|r| r - 1).collect();
            a.sort_unstable();
            let mut b = from_rows[j].clone();
            b.sort_unstable();
            if a != b {
                return Err(Error::Alist(format!(
                    "column {} disagrees with the row lists",
                    j + 1
                )));
            }
        }
        Self::from_check_lists(n, rows)
    }

    /// True iff every parity check is satisfied by `bits` (one byte per bit, 0 or 1).
    pub fn syndrome_check(&self, bits: &[u8]) -> Result<bool> {
        if bits.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: bits.len(),
            });
        }
        Ok(self.is_codeword(bits))
    }

    /// Unchecked variant of [`syndrome_check`](Self::syndrome_check) for hot loops.
    pub(crate) fn is_codeword(&self, bits: &[u8]) -> bool {
        self.check_vars
            .iter()
            .all(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ bits[v]) & 1 == 0)
    }

    /// Number of unsatisfied checks.
    pub fn syndrome_weight(&self, bits: &[u8]) -> usize {
        self.check_vars
            .iter()
            .filter(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ bits[v]) & 1 == 1)
            .count()
    }

    /// Dense row-major parity-check matrix, one `u64` word per 64 columns.
    fn dense_rows(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        self.check_vars
            .iter()
            .map(|vars| {
                let mut row = vec![0u64; words];
                for &v in vars {
                    row[v / 64] ^= 1 << (v % 64);
                }
                row
            })
            .collect()
    }

    /// Systematic encoder from Gaussian elimination of H over GF(2).
    pub fn encoder(&self) -> Encoder {
        Encoder::new(self)
    }
}

fn join<T: std::fmt::Display>(it: impl Iterator<Item = T>) -> String {
    let mut s = String::new();
    for (i, x) in it.enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s
}

struct GraphBuilder {
    var_checks: Vec<Vec<usize>>,
    check_vars: Vec<Vec<usize>>,
    dc: usize,
}

impl GraphBuilder {
    fn new(n: usize, dv: usize, dc: usize, sockets: &[usize]) -> Self {
        let m = sockets.len() / dc;
        let mut var_checks = vec![Vec::with_capacity(dv); n];
        let mut check_vars = vec![Vec::with_capacity(dc); m];
        for (s, &v) in sockets.iter().enumerate() {
            let c = s / dc;
            check_vars[c].push(v);
            var_checks[v].push(c);
        }
        GraphBuilder {
            var_checks,
            check_vars,
            dc,
        }
    }

    fn num_edges(&self) -> usize {
        self.check_vars.len() * self.dc
    }

    fn var_at(&self, e: usize) -> usize {
        self.check_vars[e / self.dc][e % self.dc]
    }

    fn is_duplicate(&self, e: usize) -> bool {
        let c = e / self.dc;
        let v = self.var_at(e);
        self.check_vars[c].iter().filter(|&&u| u == v).count() > 1
    }

    fn in_four_cycle(&self, e: usize) -> bool {
        let c = e / self.dc;
        let v = self.var_at(e);
        for &c2 in &self.var_checks[v] {
            if c2 == c {
                continue;
            }
            for &u in &self.check_vars[c2] {
                if u != v && self.check_vars[c].contains(&u) {
                    return true;
                }
            }
        }
        false
    }

    fn is_bad(&self, e: usize, four_cycles: bool) -> bool {
        self.is_duplicate(e) || (four_cycles && self.in_four_cycle(e))
    }

    fn swap(&mut self, e1: usize, e2: usize) {
        let (c1, k1) = (e1 / self.dc, e1 % self.dc);
        let (c2, k2) = (e2 / self.dc, e2 % self.dc);
        let v1 = self.check_vars[c1][k1];
        let v2 = self.check_vars[c2][k2];
        self.check_vars[c1][k1] = v2;
        self.check_vars[c2][k2] = v1;
        if let Some(p) = self.var_checks[v1].iter().position(|&c| c == c1) {
            self.var_checks[v1][p] = c2;
        }
        if let Some(p) = self.var_checks[v2].iter().position(|&c| c == c2) {
            self.var_checks[v2][p] = c1;
        }
    }

    /// Repairs bad edges by random swaps. Returns false if duplicates remain.
    fn repair<R: Rng>(&mut self, rng: &mut R, opts: ConstructionOptions) -> bool {
        let ne = self.num_edges();
        let mut budget = opts.repair_swaps;
        for four_cycles in [false, opts.avoid_four_cycles] {
            loop {
                let bad: Vec<usize> = (0..ne).filter(|&e| self.is_bad(e, four_cycles)).collect();
                if bad.is_empty() || budget == 0 {
                    break;
                }
                for e in bad {
                    if budget == 0 {
                        break;
                    }
                    if !self.is_bad(e, four_cycles) {
                        continue;
                    }
                    budget -= 1;
                    let e2 = rng.random_range(0..ne);
                    if e2 / self.dc == e / self.dc {
                        continue;
                    }
                    let v2_bad = self.is_bad(e2, four_cycles);
                    self.swap(e, e2);
                    let ok = !self.is_bad(e, four_cycles) && !self.is_bad(e2, four_cycles);
                    // Keep a swap that fixes the edge without breaking a good one.
                    if !ok && !(v2_bad && !self.is_duplicate(e) && !self.is_duplicate(e2)) {
                        self.swap(e, e2);
                    }
                }
            }
            if !four_cycles && (0..ne).any(|e| self.is_duplicate(e)) {
                return false;
            }
        }
        !(0..ne).any(|e| self.is_duplicate(e))
    }
}

/// Systematic encoder derived from the reduced row echelon form of H.
///
/// Rank deficiency is tolerated: the dimension is `n - rank(H)`.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    // For each pivot row: pivot column and the row restricted to free columns.
    pivots: Vec<(usize, Vec<u64>)>,
    info_positions: Vec<usize>,
}

impl Encoder {
    fn new(code: &LdpcCode) -> Self {
        let n = code.n();
        let mut rows = code.dense_rows();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (r..rows.len()).find(|&i| rows[i][w] & b != 0) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row[w] & b != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x ^= y;
                    }
                }
            }
            pivot_cols.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let k = info_positions.len();
        let pivots = pivot_cols
            .iter()
            .enumerate()
            .map(|(i, &pc)| {
                let mut packed = vec![0u64; k.div_ceil(64).max(1)];
                for (j, &f) in info_positions.iter().enumerate() {
                    if rows[i][f / 64] >> (f % 64) & 1 == 1 {
                        packed[j / 64] |= 1 << (j % 64);
                    }
                }
                (pc, packed)
            })
            .collect();
        Encoder {
            n,
            pivots,
            info_positions,
        }
    }

    /// Code dimension `n - rank(H)`.
    pub fn dimension(&self) -> usize {
        self.info_positions.len()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Codeword positions that carry the information bits, in order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.dimension(),
                actual: info.len(),
            });
        }
        let mut packed = vec![0u64; info.len().div_ceil(64).max(1)];
        let mut x = vec![0u8; self.n];
        for (j, (&b, &pos)) in info.iter().zip(&self.info_positions).enumerate() {
            let b = b & 1;
            x[pos] = b;
            packed[j / 64] |= (b as u64) << (j % 64);
        }
        for (pc, row) in &self.pivots {
            let parity = row
                .iter()
                .zip(&packed)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            x[*pc] = (parity & 1) as u8;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 6 bits, 3 checks, each bit in 2 checks and each check on 4 bits.
    pub(crate) fn hand_code() -> LdpcCode {
        LdpcCode::from_check_lists(
            6,
            vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![2, 3, 4, 5]],
        )
        .unwrap()
    }

    const HAND_ALIST: &str =
        "6 3\n2 4\n2 2 2 2 2 2\n4 4 4\n1 2\n1 2\n1 3\n1 3\n2 3\n2 3\n1 2 3 4\n1 2 5 6\n3 4 5 6\n";

    #[test]
    fn generate_length_1000_code() {
        let code = LdpcCode::generate_regular(1000, 3, 6, 1).unwrap();
        assert_eq!(code.m(), 500);
        assert_eq!(code.num_edges(), 3000);
        for v in 0..code.n() {
            assert_eq!(code.var_checks(v).len(), 3);
        }
        for c in 0..code.m() {
            let vars = code.check_vars(c);
            assert_eq!(vars.len(), 6);
            assert!(vars.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(code.count_four_cycles(), 0);
    }

    #[test]
    fn small_valid_degrees() {
        let code = LdpcCode::generate_regular(6, 2, 4, 0).unwrap();
        assert_eq!(code.m(), 3);
        assert_eq!(code.num_edges(), 12);
    }

    #[test]
    fn indivisible_degrees_rejected() {
        assert!(matches!(
            LdpcCode::generate_regular(4, 3, 5, 0),
            Err(Error::InvalidDegrees(_))
        ));
        assert!(matches!(
            LdpcCode::generate_regular(4, 2, 8, 0),
            Err(Error::InvalidDegrees(_))
        ));
    }

    #[test]
    fn exhausted_budget_fails() {
        // Every check must hold all four bits; a random permutation without
        // repair swaps almost never achieves that.
        let err = LdpcCode::generate_regular_with(
            4,
            3,
            4,
            0,
            ConstructionOptions {
                retries: 1,
                repair_swaps: 0,
                avoid_four_cycles: false,
            },
        );
        assert!(matches!(err, Err(Error::ConstructionFailed(_))));
        assert!(LdpcCode::generate_regular(4, 3, 4, 0).is_ok());
    }

    #[test]
    fn alist_round_trip() {
        let code = LdpcCode::generate_regular(1000, 3, 6, 1).unwrap();
        let back = LdpcCode::from_alist(&code.to_alist()).unwrap();
        assert_eq!(back, code);
    }

    #[test]
    fn alist_matches_hand_graph() {
        let parsed = LdpcCode::from_alist(HAND_ALIST).unwrap();
        assert_eq!(parsed, hand_code());
        assert_eq!(parsed.to_alist(), HAND_ALIST);
    }

    #[test]
    fn alist_degree_mismatch() {
        let bad = HAND_ALIST.replacen("1 2\n1 2\n1 3", "1 2 3\n1 2\n1 3", 1);
        assert!(matches!(LdpcCode::from_alist(&bad), Err(Error::Alist(_))));
    }

    #[test]
    fn alist_out_of_range() {
        let bad = HAND_ALIST.replacen("1 2\n1 2\n1 3", "1 9\n1 2\n1 3", 1);
        assert!(matches!(LdpcCode::from_alist(&bad), Err(Error::Alist(_))));
    }

    #[test]
    fn alist_inconsistent_lists() {
        let bad = HAND_ALIST.replace("3 4 5 6\n", "3 4 5 1\n");
        assert!(LdpcCode::from_alist(&bad).is_err());
    }

    #[test]
    fn alist_zero_padding_accepted() {
        let padded = HAND_ALIST.replace("\n1 2\n1 2\n", "\n1 2 0\n1 2 0\n");
        assert_eq!(LdpcCode::from_alist(&padded).unwrap(), hand_code());
    }

    #[test]
    fn syndrome_basics() {
        let code = LdpcCode::generate_regular(1000, 3, 6, 1).unwrap();
        let mut x = vec![0u8; 1000];
        assert!(code.syndrome_check(&x).unwrap());
        x[17] = 1;
        assert!(!code.syndrome_check(&x).unwrap());
        assert_eq!(code.syndrome_weight(&x), 3);
        assert!(matches!(
            code.syndrome_check(&x[..10]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn syndrome_matches_matrix_product() {
        let code = hand_code();
        let h = [[1, 1, 1, 1, 0, 0], [1, 1, 0, 0, 1, 1], [0, 0, 1, 1, 1, 1]];
        for word in 0u32..64 {
            let x: Vec<u8> = (0..6).map(|i| (word >> i & 1) as u8).collect();
            let zero = h
                .iter()
                .all(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum::<u8>() % 2 == 0);
            assert_eq!(code.syndrome_check(&x).unwrap(), zero, "word {word:06b}");
        }
    }

    #[test]
    fn encoder_hand_code() {
        let code = hand_code();
        let enc = code.encoder();
        // Row 3 is the sum of rows 1 and 2.
        assert_eq!(enc.rank(), 2);
        assert_eq!(enc.dimension(), 4);
        let mut count = 0;
        for info in 0u32..16 {
            let bits: Vec<u8> = (0..4).map(|i| (info >> i & 1) as u8).collect();
            let x = enc.encode(&bits).unwrap();
            assert!(code.syndrome_check(&x).unwrap());
            for (b, &p) in bits.iter().zip(enc.info_positions()) {
                assert_eq!(x[p], *b);
            }
            count += 1;
        }
        assert_eq!(count, 16);
    }

    #[test]
    fn encoder_length_1000_code() {
        let code = LdpcCode::generate_regular(1000, 3, 6, 1).unwrap();
        let enc = code.encoder();
        assert!(enc.dimension() >= 500);
        assert_eq!(enc.dimension() + enc.rank(), 1000);
        assert_eq!(
            enc.encode(&vec![0; enc.dimension()]).unwrap(),
            vec![0u8; 1000]
        );
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let info: Vec<u8> = (0..enc.dimension())
                .map(|_| rng.random_range(0..2))
                .collect();
            assert!(code.syndrome_check(&enc.encode(&info).unwrap()).unwrap());
        }
        assert!(enc.encode(&[0, 1]).is_err());
    }
}
