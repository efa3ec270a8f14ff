//! A1-style cell addresses, references and rectangles.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest column accepted by the parser (`XFD` in common spreadsheet systems
/// is 16384; we allow a little more but keep arithmetic well inside `u32`).
pub const MAX_COL: u32 = 1 << 20;
pub const MAX_ROW: u32 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed cell address `{0}`")]
pub struct MalformedAddress(pub String);

/// Absolute position of a cell on the sheet. Both axes are 1-based.
///
/// Ordering is row-major: `A1 < B1 < A2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellAddress {
    pub col: u32,
    pub row: u32,
}

impl CellAddress {
    /// Panics if either coordinate is zero.
    pub fn new(col: u32, row: u32) -> Self {
        assert!(col >= 1 && row >= 1, "cell coordinates are 1-based");
        CellAddress { col, row }
    }

    pub fn checked(col: i64, row: i64) -> Option<Self> {
        if (1..=MAX_COL as i64).contains(&col) && (1..=MAX_ROW as i64).contains(&row) {
            Some(CellAddress {
                col: col as u32,
                row: row as u32,
            })
        } else {
            None
        }
    }

    pub fn offset(self, dc: i64, dr: i64) -> Option<Self> {
        Self::checked(self.col as i64 + dc, self.row as i64 + dr)
    }
}

impl Ord for CellAddress {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.row, self.col).cmp(&(other.row, other.col))
    }
}

impl PartialOrd for CellAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bijective base-26 column name: 1 → `A`, 26 → `Z`, 27 → `AA`.
pub fn column_name(mut col: u32) -> String {
    let mut out = Vec::new();
    while col > 0 {
        let rem = (col - 1) % 26;
        out.push(b'A' + rem as u8);
        col = (col - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Inverse of [`column_name`]; accepts either letter case.
pub fn column_number(letters: &str) -> Option<u32> {
    if letters.is_empty() {
        return None;
    }
    let mut col: u32 = 0;
    for b in letters.bytes() {
        if !b.is_ascii_alphabetic() {
            return None;
        }
        let digit = (b.to_ascii_uppercase() - b'A') as u32 + 1;
        col = col.checked_mul(26)?.checked_add(digit)?;
        if col > MAX_COL {
            return None;
        }
    }
    Some(col)
}

fn parse_row(digits: &str) -> Option<u32> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let row: u32 = digits.parse().ok()?;
    (1..=MAX_ROW).contains(&row).then_some(row)
}

/// Parses `letters digits`, e.g. `B12` or `AA10`.
pub fn parse_address(text: &str) -> Result<CellAddress, MalformedAddress> {
    let split = text
        .find(|c: char| !c.is_ascii_alphabetic())
        .unwrap_or(text.len());
    let (letters, digits) = text.split_at(split);
    match (column_number(letters), parse_row(digits)) {
        (Some(col), Some(row)) => Ok(CellAddress { col, row }),
        _ => Err(MalformedAddress(text.to_string())),
    }
}

impl FromStr for CellAddress {
    type Err = MalformedAddress;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_address(s)
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", column_name(self.col), self.row)
    }
}

impl Serialize for CellAddress {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A reference as written in a formula. Coordinates are absolute sheet
/// coordinates; the flags record which axes carry a `$` marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellRef {
    pub col: u32,
    pub row: u32,
    pub col_absolute: bool,
    pub row_absolute: bool,
}

impl CellRef {
    pub fn relative(addr: CellAddress) -> Self {
        CellRef {
            col: addr.col,
            row: addr.row,
            col_absolute: false,
            row_absolute: false,
        }
    }

    pub fn absolute(addr: CellAddress) -> Self {
        CellRef {
            col: addr.col,
            row: addr.row,
            col_absolute: true,
            row_absolute: true,
        }
    }

    pub fn address(&self) -> CellAddress {
        CellAddress {
            col: self.col,
            row: self.row,
        }
    }

    /// Moves the relative axes by `(dc, dr)`, as a copy-paste would.
    pub fn translate(&self, dc: i64, dr: i64) -> Option<CellRef> {
        let col = if self.col_absolute {
            self.col as i64
        } else {
            self.col as i64 + dc
        };
        let row = if self.row_absolute {
            self.row as i64
        } else {
            self.row as i64 + dr
        };
        let addr = CellAddress::checked(col, row)?;
        Some(CellRef {
            col: addr.col,
            row: addr.row,
            ..*self
        })
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dollar = |abs: bool| if abs { "$" } else { "" };
        write!(
            f,
            "{}{}{}{}",
            dollar(self.col_absolute),
            column_name(self.col),
            dollar(self.row_absolute),
            self.row
        )
    }
}

/// A rectangular range `start:end`, stored with `start` at the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RangeRef {
    pub start: CellRef,
    pub end: CellRef,
}

impl RangeRef {
    /// Reorders the endpoints axis by axis; each coordinate keeps its own `$` flag.
    pub fn new(a: CellRef, b: CellRef) -> Self {
        let (c0, c1) = if a.col <= b.col {
            ((a.col, a.col_absolute), (b.col, b.col_absolute))
        } else {
            ((b.col, b.col_absolute), (a.col, a.col_absolute))
        };
        let (r0, r1) = if a.row <= b.row {
            ((a.row, a.row_absolute), (b.row, b.row_absolute))
        } else {
            ((b.row, b.row_absolute), (a.row, a.row_absolute))
        };
        RangeRef {
            start: CellRef {
                col: c0.0,
                col_absolute: c0.1,
                row: r0.0,
                row_absolute: r0.1,
            },
            end: CellRef {
                col: c1.0,
                col_absolute: c1.1,
                row: r1.0,
                row_absolute: r1.1,
            },
        }
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.start.address(), self.end.address())
    }
}

impl fmt::Display for RangeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

/// Closed rectangle of cells, ignoring reference modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub top_left: CellAddress,
    pub bottom_right: CellAddress,
}

impl Rect {
    pub fn new(a: CellAddress, b: CellAddress) -> Self {
        Rect {
            top_left: CellAddress {
                col: a.col.min(b.col),
                row: a.row.min(b.row),
            },
            bottom_right: CellAddress {
                col: a.col.max(b.col),
                row: a.row.max(b.row),
            },
        }
    }

    pub fn single(a: CellAddress) -> Self {
        Rect::new(a, a)
    }

    pub fn width(&self) -> u32 {
        self.bottom_right.col - self.top_left.col + 1
    }

    pub fn height(&self) -> u32 {
        self.bottom_right.row - self.top_left.row + 1
    }

    pub fn len(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, a: CellAddress) -> bool {
        (self.top_left.col..=self.bottom_right.col).contains(&a.col)
            && (self.top_left.row..=self.bottom_right.row).contains(&a.row)
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let c0 = self.top_left.col.max(other.top_left.col);
        let c1 = self.bottom_right.col.min(other.bottom_right.col);
        let r0 = self.top_left.row.max(other.top_left.row);
        let r1 = self.bottom_right.row.min(other.bottom_right.row);
        (c0 <= c1 && r0 <= r1).then(|| Rect::new(CellAddress::new(c0, r0), CellAddress::new(c1, r1)))
    }

    /// Smallest rectangle containing every address; `None` for an empty input.
    pub fn hull<I: IntoIterator<Item = CellAddress>>(cells: I) -> Option<Rect> {
        cells.into_iter().fold(None, |acc, a| match acc {
            None => Some(Rect::single(a)),
            Some(r) => Some(Rect::new(
                CellAddress::new(r.top_left.col.min(a.col), r.top_left.row.min(a.row)),
                CellAddress::new(r.bottom_right.col.max(a.col), r.bottom_right.row.max(a.row)),
            )),
        })
    }

    /// Covered cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = CellAddress> + '_ {
        let (c0, c1) = (self.top_left.col, self.bottom_right.col);
        (self.top_left.row..=self.bottom_right.row)
            .flat_map(move |row| (c0..=c1).map(move |col| CellAddress { col, row }))
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.top_left, self.bottom_right)
    }
}

impl Serialize for Rect {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
