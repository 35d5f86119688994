//! Product code built from two copies of the component code, with the
//! iterative row/column decoder and intersection-flipping post-processing.
//!
//! The information block sits at rows and columns `16..n-1` of the product
//! matrix, which is where the component code puts its information bits.

use crate::component::{pack_line, ComponentCode, Line};
use crate::error::{Error, Result};

/// Largest failed-line count that still triggers post-processing (t + 1).
pub const PP_MAX_FAILED: usize = crate::bch::T + 1;

/// An `n x n` bit matrix. Rows and columns are both kept as packed bitsets so
/// that either orientation can be handed to the component decoder directly.
#[derive(Clone, PartialEq, Eq)]
pub struct ProductMatrix {
    n: usize,
    rows: Vec<Line>,
    cols: Vec<Line>,
}

impl std::fmt::Debug for ProductMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductMatrix")
            .field("n", &self.n)
            .field("weight", &self.weight())
            .finish()
    }
}

impl ProductMatrix {
    pub fn zeros(n: usize) -> ProductMatrix {
        assert!(n <= 256);
        ProductMatrix {
            n,
            rows: vec![[0; 4]; n],
            cols: vec![[0; 4]; n],
        }
    }

    /// Builds a matrix from `n * n` row-major bits.
    pub fn from_bits(n: usize, bits: &[u8]) -> Result<ProductMatrix> {
        if n > 256 || bits.len() != n * n {
            return Err(Error::InvalidLength {
                what: "product matrix",
                expected: n * n,
                got: bits.len(),
            });
        }
        let rows: Vec<Line> = bits.chunks_exact(n.max(1)).take(n).map(pack_line).collect();
        Ok(ProductMatrix::from_rows(n, rows))
    }

    /// Builds a matrix from packed rows. Bits at or above `n` must be clear.
    pub fn from_rows(n: usize, rows: Vec<Line>) -> ProductMatrix {
        assert!(n <= 256 && rows.len() == n);
        let cols = transpose_lines(&rows, n);
        ProductMatrix { n, rows, cols }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for r in 0..self.n {
            out.extend((0..self.n).map(|c| self.get(r, c)));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        ((self.rows[row][col / 64] >> (col % 64)) & 1) as u8
    }

    #[inline]
    pub fn flip(&mut self, row: usize, col: usize) {
        self.rows[row][col / 64] ^= 1 << (col % 64);
        self.cols[col][row / 64] ^= 1 << (row % 64);
    }

    pub fn set(&mut self, row: usize, col: usize, v: u8) {
        if self.get(row, col) != v & 1 {
            self.flip(row, col);
        }
    }

    pub fn row(&self, r: usize) -> &Line {
        &self.rows[r]
    }

    pub fn col(&self, c: usize) -> &Line {
        &self.cols[c]
    }

    pub fn line(&self, orientation: Orientation, i: usize) -> &Line {
        match orientation {
            Orientation::Rows => &self.rows[i],
            Orientation::Cols => &self.cols[i],
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|l| l.iter())
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    /// Number of positions where the two matrices differ.
    pub fn distance(&self, other: &ProductMatrix) -> usize {
        assert_eq!(self.n, other.n);
        self.rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| a.iter().zip(b.iter()))
            .map(|(x, y)| (x ^ y).count_ones() as usize)
            .sum()
    }

    /// Transposed copy.
    pub fn transpose(&self) -> ProductMatrix {
        ProductMatrix {
            n: self.n,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Rows,
    Cols,
}

/// Indices of lines whose component decode failed in the latest
/// half-iteration of each orientation. Kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailureRegisters {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Flip intersections after the last column half-iteration.
    Reference,
    /// Flip during the last column half-iteration, using the row register.
    Hardware,
}

impl std::str::FromStr for Schedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Schedule> {
        match s {
            "reference" => Ok(Schedule::Reference),
            "hardware" => Ok(Schedule::Hardware),
            other => Err(Error::InvalidConfig(format!("unknown schedule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DecoderConfig {
    /// Full iterations (row + column half-iterations each), at least 1.
    pub iterations: usize,
    pub post_processing: bool,
    pub schedule: Schedule,
    /// Stop once a row and a column half-iteration in a row were both clean.
    /// Off by default.
    pub early_exit: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            iterations: 2,
            post_processing: true,
            schedule: Schedule::Hardware,
            early_exit: false,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeReport {
    /// True iff the final column register is empty.
    pub success: bool,
    pub matrix: ProductMatrix,
    /// Includes the two post-processing half-iterations when they ran.
    pub half_iterations_run: usize,
    /// Intersection bits were flipped.
    pub pp_applied: bool,
    pub pp_iteration_run: bool,
    pub final_registers: FailureRegisters,
}

/// Per-half-iteration summary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HalfIterationResult {
    pub failed: Vec<usize>,
    pub flips: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProductCode {
    component: ComponentCode,
}

impl ProductCode {
    pub fn new(component: ComponentCode) -> ProductCode {
        ProductCode { component }
    }

    pub fn component(&self) -> &ComponentCode {
        &self.component
    }

    pub fn n(&self) -> usize {
        self.component.n()
    }

    pub fn k(&self) -> usize {
        self.component.k()
    }

    /// Code length `N = n^2`.
    pub fn length(&self) -> usize {
        self.n() * self.n()
    }

    /// Information bits `K = k^2`.
    pub fn info_len(&self) -> usize {
        self.k() * self.k()
    }

    /// First matrix index of the information region on either axis.
    pub fn info_offset(&self) -> usize {
        crate::bch::PARITY_BITS
    }

    fn check_info(&self, info: &[u8]) -> Result<()> {
        if info.len() != self.info_len() {
            return Err(Error::InvalidLength {
                what: "product information block",
                expected: self.info_len(),
                got: info.len(),
            });
        }
        Ok(())
    }

    /// Encodes a row-major `k x k` information block: rows first, then all
    /// `n` columns.
    pub fn encode(&self, info: &[u8]) -> Result<ProductMatrix> {
        self.check_info(info)?;
        let k = self.k();
        let rows: Vec<Line> = info.chunks_exact(k).map(pack_line).collect();
        self.encode_packed(&rows)
    }

    /// Packed form of [`encode`](Self::encode): bit `j` of `info_rows[i]` is
    /// information bit `(i, j)`.
    pub fn encode_packed(&self, info_rows: &[Line]) -> Result<ProductMatrix> {
        let (n, k, off) = (self.n(), self.k(), self.info_offset());
        if info_rows.len() != k {
            return Err(Error::InvalidLength {
                what: "product information rows",
                expected: k,
                got: info_rows.len(),
            });
        }
        let code = &self.component;
        let mut rows = vec![[0u64; 4]; n];
        for (i, info) in info_rows.iter().enumerate() {
            let line = &mut rows[off + i];
            *line = shift_up(info, off);
            code.encode_packed(line);
        }
        // Column parities are linear in the information rows: parity row r
        // is the sum of the information rows whose unit column word sets r.
        let parity_rows: Vec<usize> = (0..off).chain([code.parity_index()]).collect();
        for i in 0..k {
            let mut unit = [0u64; 4];
            unit[(off + i) / 64] = 1 << ((off + i) % 64);
            code.encode_packed(&mut unit);
            let src = rows[off + i];
            for &r in &parity_rows {
                if (unit[r / 64] >> (r % 64)) & 1 == 1 {
                    for (d, s) in rows[r].iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(ProductMatrix::from_rows(n, rows))
    }

    /// Same code, columns encoded first, one bit at a time. Produces the
    /// identical matrix.
    pub fn encode_columns_first(&self, info: &[u8]) -> Result<ProductMatrix> {
        self.check_info(info)?;
        let (n, k) = (self.n(), self.k());
        let code = &self.component;
        // n x k after the column stage
        let mut stage1 = vec![0u8; n * k];
        let mut col_info = vec![0u8; k];
        let mut col_out = vec![0u8; n];
        for j in 0..k {
            for (i, slot) in col_info.iter_mut().enumerate() {
                *slot = info[i * k + j];
            }
            code.encode_into(&col_info, &mut col_out);
            for (r, &b) in col_out.iter().enumerate() {
                stage1[r * k + j] = b;
            }
        }
        let mut dense = vec![0u8; n * n];
        for r in 0..n {
            code.encode_into(&stage1[r * k..(r + 1) * k], &mut dense[r * n..(r + 1) * n]);
        }
        ProductMatrix::from_bits(n, &dense)
    }

    /// Reads the `k x k` information block back out of a matrix.
    pub fn extract_info(&self, m: &ProductMatrix) -> Vec<u8> {
        let (k, off) = (self.k(), self.info_offset());
        let mut out = Vec::with_capacity(k * k);
        for i in 0..k {
            let line = shift_down(m.row(off + i), off);
            out.extend((0..k).map(|j| ((line[j / 64] >> (j % 64)) & 1) as u8));
        }
        out
    }

    /// Number of information positions where `a` and `b` differ.
    pub fn info_distance(&self, a: &ProductMatrix, b: &ProductMatrix) -> usize {
        let (k, off) = (self.k(), self.info_offset());
        let mut mask = [0u64; 4];
        for j in off..off + k {
            mask[j / 64] |= 1 << (j % 64);
        }
        (off..off + k)
            .map(|r| {
                (0..4)
                    .map(|w| ((a.rows[r][w] ^ b.rows[r][w]) & mask[w]).count_ones() as usize)
                    .sum::<usize>()
            })
            .sum()
    }

    /// True iff every row and column is a component codeword.
    pub fn verify_codeword(&self, m: &ProductMatrix) -> bool {
        use crate::component::ComponentStatus::NoErrors;
        m.n() == self.n()
            && (0..self.n()).all(|i| {
                self.component.decode_packed(m.row(i)).status == NoErrors
                    && self.component.decode_packed(m.col(i)).status == NoErrors
            })
    }

    /// Decodes every line of one orientation against the live matrix and
    /// applies the proposed flips. When `pp_rows` is given (column
    /// half-iterations only), a failed column has the bits on those rows
    /// flipped instead of being left alone.
    pub fn half_iteration(
        &self,
        m: &mut ProductMatrix,
        orientation: Orientation,
        pp_rows: Option<&[usize]>,
    ) -> HalfIterationResult {
        self.decode_lines(m, orientation, 0..self.n(), pp_rows)
    }

    fn decode_lines(
        &self,
        m: &mut ProductMatrix,
        orientation: Orientation,
        lines: impl IntoIterator<Item = usize>,
        pp_rows: Option<&[usize]>,
    ) -> HalfIterationResult {
        debug_assert!(pp_rows.is_none() || orientation == Orientation::Cols);
        let mut res = HalfIterationResult::default();
        for i in lines {
            let outcome = self.component.decode_packed(m.line(orientation, i));
            if outcome.is_failure() {
                res.failed.push(i);
                if let Some(rows) = pp_rows {
                    for &r in rows {
                        m.flip(r, i);
                    }
                    res.flips += rows.len();
                }
                continue;
            }
            for &p in outcome.flips.as_slice() {
                match orientation {
                    Orientation::Rows => m.flip(i, p),
                    Orientation::Cols => m.flip(p, i),
                }
            }
            res.flips += outcome.flips.len();
        }
        res.failed.sort_unstable();
        res
    }

    /// Iterative decoding: `2L` alternating half-iterations starting with rows,
    /// then optional post-processing.
    pub fn decode(&self, received: &ProductMatrix, cfg: &DecoderConfig) -> Result<DecodeReport> {
        cfg.validate()?;
        if received.n() != self.n() {
            return Err(Error::InvalidLength {
                what: "product matrix side",
                expected: self.n(),
                got: received.n(),
            });
        }
        let mut m = received.clone();
        let mut regs = FailureRegisters::default();
        let total_halves = 2 * cfg.iterations;
        let pp_in_range = |set: &[usize]| !set.is_empty() && set.len() <= PP_MAX_FAILED;
        let mut halves_run = 0;
        let mut prev_clean = false;
        let mut pp_applied = false;

        for h in 0..total_halves {
            let last = h + 1 == total_halves;
            let res = if h % 2 == 0 {
                let res = self.half_iteration(&mut m, Orientation::Rows, None);
                regs.rows = res.failed.clone();
                res
            } else {
                let pp_rows = (last
                    && cfg.post_processing
                    && cfg.schedule == Schedule::Hardware
                    && pp_in_range(&regs.rows))
                .then_some(regs.rows.as_slice());
                let res = self.half_iteration(&mut m, Orientation::Cols, pp_rows);
                if pp_rows.is_some() && !res.failed.is_empty() {
                    pp_applied = true;
                }
                regs.cols = res.failed.clone();
                res
            };
            halves_run += 1;
            let clean = res.failed.is_empty() && res.flips == 0;
            if cfg.early_exit && clean && prev_clean && h % 2 == 1 {
                break;
            }
            prev_clean = clean;
        }

        let mut pp_iteration_run = false;
        if cfg.post_processing && pp_in_range(&regs.rows) && pp_in_range(&regs.cols) {
            if cfg.schedule == Schedule::Reference {
                for &r in &regs.rows {
                    for &c in &regs.cols {
                        m.flip(r, c);
                    }
                }
                pp_applied = true;
            }
            let rows = std::mem::take(&mut regs.rows);
            let cols = std::mem::take(&mut regs.cols);
            regs.rows = self
                .decode_lines(&mut m, Orientation::Rows, rows, None)
                .failed;
            regs.cols = self
                .decode_lines(&mut m, Orientation::Cols, cols, None)
                .failed;
            pp_iteration_run = true;
            halves_run += 2;
        }

        Ok(DecodeReport {
            success: regs.cols.is_empty(),
            matrix: m,
            half_iterations_run: halves_run,
            pp_applied,
            pp_iteration_run,
            final_registers: regs,
        })
    }
}

fn shift_up(line: &Line, s: usize) -> Line {
    debug_assert!(s > 0 && s < 64);
    let mut out = [0u64; 4];
    out[0] = line[0] << s;
    for w in 1..4 {
        out[w] = (line[w] << s) | (line[w - 1] >> (64 - s));
    }
    out
}

fn shift_down(line: &Line, s: usize) -> Line {
    debug_assert!(s > 0 && s < 64);
    let mut out = [0u64; 4];
    for w in 0..3 {
        out[w] = (line[w] >> s) | (line[w + 1] << (64 - s));
    }
    out[3] = line[3] >> s;
    out
}

fn transpose_lines(rows: &[Line], n: usize) -> Vec<Line> {
    let mut cols = vec![[0u64; 4]; n];
    for (r, line) in rows.iter().enumerate() {
        for (w, &word) in line.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let c = w * 64 + bits.trailing_zeros() as usize;
                cols[c][r / 64] |= 1 << (r % 64);
                bits &= bits - 1;
            }
        }
    }
    cols
}
