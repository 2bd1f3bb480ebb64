//! Binary linear codes given by sparse parity-check matrices.
//!
//! A code of length `n` is the set of binary words `x` with
//! `<h_j, x> = 0 (mod 2)` for every row `h_j` of its parity-check matrix.
//! Besides the matrix type this module carries the alist reader/writer,
//! a seeded regular-LDPC generator and the exhaustive maximum-likelihood
//! decoder used as a test oracle for small codes.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest code dimension accepted by [`enumerate_codewords`].
pub const MAX_ENUMERATION_DIMENSION: usize = 20;

/// An `m x n` parity-check matrix over GF(2), stored as sorted row supports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseBinaryMatrix {
    n: usize,
    rows: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from row supports. Supports are sorted; duplicate,
    /// out-of-range or empty rows are rejected.
    pub fn new(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut checked = Vec::with_capacity(rows.len());
        for (j, mut row) in rows.into_iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidMatrix(format!("row {j} has empty support")));
            }
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidMatrix(format!(
                    "row {j} lists column {} twice",
                    w[0]
                )));
            }
            if let Some(&last) = row.last() {
                if last >= n {
                    return Err(Error::InvalidMatrix(format!(
                        "row {j} references column {last} but n = {n}"
                    )));
                }
            }
            checked.push(row);
        }
        Ok(Self { n, rows: checked })
    }

    /// Builds a matrix from a dense 0/1 table.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n = dense.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(dense.len());
        for (j, r) in dense.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidMatrix(format!("row {j} has ragged length")));
            }
            rows.push(
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
        Self::new(n, rows)
    }

    /// The parity-check matrix of the (7,4) Hamming code used throughout the
    /// test suites: three checks of degree four.
    pub fn hamming_7_4() -> Self {
        Self::new(
            7,
            vec![vec![0, 1, 2, 4], vec![0, 1, 3, 5], vec![0, 2, 3, 6]],
        )
        .expect("static matrix is valid")
    }

    /// Length-`n` repetition code as a chain of degree-two checks.
    pub fn repetition(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "repetition length must be >= 2".into(),
            ));
        }
        Self::new(n, (0..n - 1).map(|i| vec![i, i + 1]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &[usize] {
        &self.rows[j]
    }

    /// Column supports (sorted row indices per column).
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n];
        for (j, row) in self.rows.iter().enumerate() {
            for &i in row {
                cols[i].push(j);
            }
        }
        cols
    }

    pub fn max_row_degree(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_column_degree(&self) -> usize {
        self.columns().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        GfEchelon::reduce(self).pivots.len()
    }

    /// Parses alist text (1-based indices).
    pub fn from_alist(text: &str) -> Result<Self> {
        parse_alist(text)
    }

    pub fn to_alist(&self) -> String {
        write_alist(self)
    }
}

/// A binary word of code length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::OutOfRange(format!(
                "bit {i} is {} (expected 0 or 1)",
                bits[i]
            )));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}

/// Log-likelihood ratios; positive values favour bit 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(if i == 0 {
                "llr[0]"
            } else {
                "llr vector"
            }));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// `<gamma, x>` accumulated left to right.
    pub fn cost(&self, word: &BinaryWord) -> f64 {
        self.0
            .iter()
            .zip(word.bits())
            .filter(|(_, &b)| b == 1)
            .fold(0.0, |acc, (g, _)| acc + g)
    }
}

pub fn is_codeword(h: &SparseBinaryMatrix, x: &BinaryWord) -> Result<bool> {
    if x.len() != h.n() {
        return Err(Error::DimensionMismatch {
            context: "is_codeword",
            expected: h.n(),
            got: x.len(),
        });
    }
    let bits = x.bits();
    Ok(h.rows()
        .iter()
        .all(|row| row.iter().filter(|&&i| bits[i] == 1).count() % 2 == 0))
}

/// Reduced row echelon form of `H` over GF(2) with packed rows.
struct GfEchelon {
    n: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl GfEchelon {
    fn reduce(h: &SparseBinaryMatrix) -> Self {
        let n = h.n();
        let words = n.div_ceil(64).max(1);
        let mut rows: Vec<Vec<u64>> = h
            .rows()
            .iter()
            .map(|r| {
                let mut packed = vec![0u64; words];
                for &i in r {
                    packed[i / 64] |= 1 << (i % 64);
                }
                packed
            })
            .collect();
        let bit = |row: &[u64], i: usize| (row[i / 64] >> (i % 64)) & 1 == 1;

        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..rows.len()).find(|&r| bit(&rows[r], col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && bit(row, col) {
                    for (w, pw) in row.iter_mut().zip(&pivot_row) {
                        *w ^= pw;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        Self { n, rows, pivots }
    }

    fn bit(&self, r: usize, i: usize) -> bool {
        (self.rows[r][i / 64] >> (i % 64)) & 1 == 1
    }
}

/// All codewords of `H` in lexicographic order (bit 0 most significant).
pub fn enumerate_codewords(h: &SparseBinaryMatrix) -> Result<Vec<BinaryWord>> {
    let ech = GfEchelon::reduce(h);
    let n = ech.n;
    let mut is_pivot = vec![false; n];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !is_pivot[i]).collect();
    if free.len() > MAX_ENUMERATION_DIMENSION {
        return Err(Error::GuardExceeded {
            what: "code dimension",
            limit: MAX_ENUMERATION_DIMENSION,
            got: free.len(),
        });
    }

    let mut words = Vec::with_capacity(1 << free.len());
    for assignment in 0u64..(1u64 << free.len()) {
        let mut bits = vec![0u8; n];
        for (k, &f) in free.iter().enumerate() {
            bits[f] = ((assignment >> k) & 1) as u8;
        }
        // Each RREF row reads: x_pivot = sum of its free-column entries.
        for (r, &p) in ech.pivots.iter().enumerate() {
            let parity = free
                .iter()
                .filter(|&&f| bits[f] == 1 && ech.bit(r, f))
                .count()
                % 2;
            bits[p] = parity as u8;
        }
        words.push(BinaryWord(bits));
    }
    words.sort();
    Ok(words)
}

/// Exhaustive ML decoding: the codeword minimising `<gamma, x>`, ties going
/// to the lexicographically smallest word.
pub fn ml_decode_exhaustive(
    h: &SparseBinaryMatrix,
    gamma: &LlrVector,
) -> Result<(BinaryWord, f64)> {
    if gamma.len() != h.n() {
        return Err(Error::DimensionMismatch {
            context: "ml_decode_exhaustive",
            expected: h.n(),
            got: gamma.len(),
        });
    }
    let mut best: Option<(BinaryWord, f64)> = None;
    for word in enumerate_codewords(h)? {
        let cost = gamma.cost(&word);
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((word, cost));
        }
    }
    Ok(best.expect("the zero word is always a codeword"))
}

/// Seeded (wc, wr)-regular LDPC matrix by socket permutation with collision
/// repair.
pub fn gen_regular_ldpc(n: usize, wc: usize, wr: usize, seed: u64) -> Result<SparseBinaryMatrix> {
    if wc < 2 || wr < 2 {
        return Err(Error::InvalidParameter(format!(
            "column weight {wc} and row weight {wr} must both be >= 2"
        )));
    }
    if n == 0 || !(n * wc).is_multiple_of(wr) {
        return Err(Error::InvalidParameter(format!(
            "n*wc = {} is not divisible by wr = {wr}",
            n * wc
        )));
    }
    let m = n * wc / wr;
    if wr > n || wc > m {
        return Err(Error::InvalidParameter(format!(
            "degrees wc={wc}, wr={wr} cannot be met without repeated edges (m={m}, n={n})"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sockets: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, wc)).collect();

    const RESHUFFLES: usize = 100;
    for _ in 0..RESHUFFLES {
        sockets.shuffle(&mut rng);
        if repair_collisions(&mut sockets, wr, &mut rng) {
            let rows = sockets.chunks(wr).map(<[usize]>::to_vec).collect();
            return SparseBinaryMatrix::new(n, rows);
        }
    }
    Err(Error::InvalidParameter(format!(
        "could not place a ({wc},{wr})-regular matrix of length {n} without repeated edges"
    )))
}

fn repair_collisions(sockets: &mut [usize], wr: usize, rng: &mut ChaCha8Rng) -> bool {
    let m = sockets.len() / wr;
    let holds = |s: &[usize], row: usize, col: usize, skip: usize| {
        (row * wr..(row + 1) * wr).any(|p| p != skip && s[p] == col)
    };
    const ATTEMPTS: usize = 10_000;
    for _ in 0..ATTEMPTS {
        let Some(bad) = (0..sockets.len()).find(|&p| holds(sockets, p / wr, sockets[p], p)) else {
            return true;
        };
        let row = bad / wr;
        let other = rng.random_range(0..sockets.len());
        let orow = other / wr;
        if orow == row {
            continue;
        }
        let (a, b) = (sockets[bad], sockets[other]);
        if !holds(sockets, row, b, bad) && !holds(sockets, orow, a, other) {
            sockets.swap(bad, other);
        }
    }
    (0..m).all(|r| {
        let mut row = sockets[r * wr..(r + 1) * wr].to_vec();
        row.sort_unstable();
        row.windows(2).all(|w| w[0] != w[1])
    })
}

pub fn parse_alist(text: &str) -> Result<SparseBinaryMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut last_line = 0;

    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (no, line) = lines.next().ok_or_else(|| Error::Alist {
            line: last_line + 1,
            message: format!("unexpected end of input, expected {what}"),
        })?;
        last_line = no;
        let nums = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Alist {
                    line: no,
                    message: format!("`{t}` is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((no, nums))
    };
    let expect_len = |no: usize, nums: &[usize], len: usize, what: &str| -> Result<()> {
        if nums.len() != len {
            return Err(Error::Alist {
                line: no,
                message: format!("expected {len} numbers for {what}, found {}", nums.len()),
            });
        }
        Ok(())
    };

    let (no, dims) = next_numbers("header `n m`")?;
    expect_len(no, &dims, 2, "header `n m`")?;
    let (n, m) = (dims[0], dims[1]);
    let (no, maxes) = next_numbers("maximum degrees")?;
    expect_len(no, &maxes, 2, "maximum degrees")?;
    let (max_col, max_row) = (maxes[0], maxes[1]);

    let (no, col_deg) = next_numbers("column degrees")?;
    expect_len(no, &col_deg, n, "column degrees")?;
    if let Some(&d) = col_deg.iter().find(|&&d| d > max_col) {
        return Err(Error::Alist {
            line: no,
            message: format!("column degree {d} exceeds declared maximum {max_col}"),
        });
    }
    let (no, row_deg) = next_numbers("row degrees")?;
    expect_len(no, &row_deg, m, "row degrees")?;
    if let Some(&d) = row_deg.iter().find(|&&d| d > max_row) {
        return Err(Error::Alist {
            line: no,
            message: format!("row degree {d} exceeds declared maximum {max_row}"),
        });
    }

    // Reads one padded support line and converts it to 0-based indices.
    let mut read_support =
        |degree: usize, bound: usize, what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, nums) = next_numbers(what)?;
            if nums.len() < degree {
                return Err(Error::Alist {
                    line: no,
                    message: format!(
                        "{what}: degree {degree} declared, {} entries found",
                        nums.len()
                    ),
                });
            }
            let (support, padding) = nums.split_at(degree);
            if let Some(&p) = padding.iter().find(|&&p| p != 0) {
                return Err(Error::Alist {
                    line: no,
                    message: format!("{what}: degree mismatch, unexpected extra index {p}"),
                });
            }
            let mut out = Vec::with_capacity(degree);
            for &idx in support {
                if idx == 0 {
                    return Err(Error::Alist {
                        line: no,
                        message: format!("{what}: index 0 is invalid (indices are 1-based)"),
                    });
                }
                if idx > bound {
                    return Err(Error::Alist {
                        line: no,
                        message: format!("{what}: index {idx} out of range 1..={bound}"),
                    });
                }
                out.push(idx - 1);
            }
            Ok((no, out))
        };

    let mut columns = Vec::with_capacity(n);
    for &d in &col_deg {
        columns.push(read_support(d, m, "column support")?);
    }
    let mut rows = Vec::with_capacity(m);
    let mut row_lines = Vec::with_capacity(m);
    for &d in &row_deg {
        let (no, r) = read_support(d, n, "row support")?;
        row_lines.push(no);
        rows.push(r);
    }

    // Column lists must describe the same matrix as the row lists.
    let mut from_cols = vec![Vec::new(); m];
    for (i, (no, col)) in columns.iter().enumerate() {
        for &j in col {
            if from_cols[j].contains(&i) {
                return Err(Error::Alist {
                    line: *no,
                    message: format!("column {} lists row {} twice", i + 1, j + 1),
                });
            }
            from_cols[j].push(i);
        }
    }
    for (j, row) in rows.iter().enumerate() {
        let mut a = row.clone();
        a.sort_unstable();
        let mut b = from_cols[j].clone();
        b.sort_unstable();
        if a != b {
            return Err(Error::Alist {
                line: row_lines[j],
                message: format!("row {} disagrees with the column lists", j + 1),
            });
        }
    }

    SparseBinaryMatrix::new(n, rows).map_err(|e| Error::Alist {
        line: row_lines.first().copied().unwrap_or(last_line),
        message: e.to_string(),
    })
}

pub fn write_alist(h: &SparseBinaryMatrix) -> String {
    let cols = h.columns();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.max_row_degree();
    let join =
        |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let padded = |support: &[usize], width: usize| {
        let mut it = support
            .iter()
            .map(|&i| i + 1)
            .chain(std::iter::repeat_n(0, width - support.len()));
        join(&mut it)
    };

    let mut out = String::new();
    let _ = writeln!(out, "{} {}", h.n(), h.m());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut cols.iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut h.rows().iter().map(Vec::len)));
    for c in &cols {
        let _ = writeln!(out, "{}", padded(c, max_col));
    }
    for r in h.rows() {
        let _ = writeln!(out, "{}", padded(r, max_row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> SparseBinaryMatrix {
        SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    const CHAIN3_ALIST: &str = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";

    #[test]
    fn parses_small_alist() {
        let h = parse_alist(CHAIN3_ALIST).unwrap();
        assert_eq!(h, chain3());
        assert_eq!(h.rows(), &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn alist_round_trip_is_exact() {
        assert_eq!(
            write_alist(&parse_alist(CHAIN3_ALIST).unwrap()),
            CHAIN3_ALIST
        );
        let ham = SparseBinaryMatrix::hamming_7_4().to_alist();
        assert_eq!(parse_alist(&ham).unwrap().to_alist(), ham);
    }

    #[test]
    fn alist_rejects_zero_index() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n0 2\n2 3\n";
        match parse_alist(bad) {
            Err(Error::Alist { line, message }) => {
                assert_eq!(line, 8);
                assert!(message.contains("1-based"), "{message}");
            }
            other => panic!("expected alist error, got {other:?}"),
        }
    }

    #[test]
    fn alist_reports_bad_header_and_range() {
        assert!(matches!(
            parse_alist("3\n"),
            Err(Error::Alist { line: 1, .. })
        ));
        let out_of_range = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 4\n";
        assert!(matches!(
            parse_alist(out_of_range),
            Err(Error::Alist { line: 9, .. })
        ));
        let degree_mismatch = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3 1\n";
        assert!(matches!(
            parse_alist(degree_mismatch),
            Err(Error::Alist { line: 9, .. })
        ));
        assert!(matches!(
            parse_alist("3 2\n1 2\n1 2\n"),
            Err(Error::Alist { line: 3, .. })
        ));
    }

    #[test]
    fn codeword_predicate() {
        let h = chain3();
        assert!(is_codeword(&h, &BinaryWord::new(vec![1, 1, 1]).unwrap()).unwrap());
        assert!(is_codeword(&h, &BinaryWord::zeros(3)).unwrap());
        assert!(!is_codeword(&h, &BinaryWord::new(vec![1, 0, 0]).unwrap()).unwrap());
        assert!(is_codeword(&h, &BinaryWord::zeros(4)).is_err());
    }

    #[test]
    fn enumerates_repetition_and_trivial_codes() {
        let words = enumerate_codewords(&chain3()).unwrap();
        let bits: Vec<_> = words.iter().map(|w| w.bits().to_vec()).collect();
        assert_eq!(bits, vec![vec![0, 0, 0], vec![1, 1, 1]]);

        let one = SparseBinaryMatrix::new(1, vec![vec![0]]).unwrap();
        assert_eq!(
            enumerate_codewords(&one).unwrap(),
            vec![BinaryWord::zeros(1)]
        );
    }

    #[test]
    fn hamming_enumeration_matches_brute_force() {
        let h = SparseBinaryMatrix::hamming_7_4();
        let brute: Vec<BinaryWord> = (0u32..128)
            .map(|v| BinaryWord::new((0..7).map(|i| ((v >> (6 - i)) & 1) as u8).collect()).unwrap())
            .filter(|w| is_codeword(&h, w).unwrap())
            .collect();
        let words = enumerate_codewords(&h).unwrap();
        assert_eq!(words.len(), 16);
        assert_eq!(words, brute);
        let dmin = words
            .iter()
            .map(BinaryWord::weight)
            .filter(|&w| w > 0)
            .min();
        assert_eq!(dmin, Some(3));
        assert_eq!(h.rank(), 3);
    }

    #[test]
    fn enumeration_guard() {
        let h = SparseBinaryMatrix::new(22, vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            enumerate_codewords(&h),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn ml_examples() {
        let h = SparseBinaryMatrix::hamming_7_4();
        let (w, c) = ml_decode_exhaustive(&h, &LlrVector::new(vec![1.0; 7]).unwrap()).unwrap();
        assert_eq!(w, BinaryWord::zeros(7));
        assert_eq!(c, 0.0);

        let g = LlrVector::new(vec![-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let (w, c) = ml_decode_exhaustive(&h, &g).unwrap();
        assert_eq!(w, BinaryWord::zeros(7));
        assert_eq!(c, 0.0);

        for cw in enumerate_codewords(&h).unwrap() {
            let g =
                LlrVector::new(cw.bits().iter().map(|&b| 1.0 - 2.0 * b as f64).collect()).unwrap();
            let (w, c) = ml_decode_exhaustive(&h, &g).unwrap();
            assert_eq!(w, cw);
            assert_eq!(c, -(cw.weight() as f64));
        }
    }

    #[test]
    fn ml_ties_pick_smallest_word() {
        // Both codewords cost zero.
        let (w, _) =
            ml_decode_exhaustive(&chain3(), &LlrVector::new(vec![0.0; 3]).unwrap()).unwrap();
        assert_eq!(w, BinaryWord::zeros(3));
    }

    #[test]
    fn regular_ldpc_degrees_and_determinism() {
        let h = gen_regular_ldpc(12, 3, 6, 7).unwrap();
        assert_eq!((h.m(), h.n()), (6, 12));
        assert!(h.rows().iter().all(|r| r.len() == 6));
        assert!(h.columns().iter().all(|c| c.len() == 3));
        assert_eq!(h, gen_regular_ldpc(12, 3, 6, 7).unwrap());
        assert!(gen_regular_ldpc(10, 3, 4, 7).is_err());
        assert!(gen_regular_ldpc(10, 1, 5, 7).is_err());
    }

    #[test]
    fn regular_ldpc_many_seeds() {
        for seed in 0..50 {
            let h = gen_regular_ldpc(20, 3, 4, seed).unwrap();
            assert!(h.rows().iter().all(|r| r.len() == 4));
            assert!(h.columns().iter().all(|c| c.len() == 3));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = SparseBinaryMatrix> {
            (2usize..10).prop_flat_map(|n| {
                proptest::collection::vec(proptest::collection::btree_set(0..n, 1..=n.min(5)), 1..6)
                    .prop_map(move |rows| {
                        SparseBinaryMatrix::new(
                            n,
                            rows.into_iter().map(|s| s.into_iter().collect()).collect(),
                        )
                        .unwrap()
                    })
            })
        }

        proptest! {
            #[test]
            fn enumerated_words_are_codewords(h in small_matrix()) {
                let words = enumerate_codewords(&h).unwrap();
                prop_assert_eq!(words.len(), 1usize << (h.n() - h.rank()));
                for w in &words {
                    prop_assert!(is_codeword(&h, w).unwrap());
                }
            }

            #[test]
            fn alist_round_trip(h in small_matrix()) {
                let text = h.to_alist();
                let back = parse_alist(&text).unwrap();
                prop_assert_eq!(back.to_alist(), text);
                prop_assert_eq!(back, h);
            }

            #[test]
            fn ml_is_minimal(h in small_matrix(), seed in 0u64..1000) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = LlrVector::new((0..h.n()).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
                let (_, best) = ml_decode_exhaustive(&h, &g).unwrap();
                for w in enumerate_codewords(&h).unwrap() {
                    prop_assert!(best <= g.cost(&w));
                }
            }
        }
    }
}
