//! Origin-relative normal form of formulas.
//!
//! Two cells filled by copy-paste from the same source end up with equal
//! [`NormalizedExpr`]s; dropping reference modes and literal values further
//! yields a [`Skeleton`], the shape-only fingerprint used to spot near-miss
//! copies.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::address::{column_name, CellAddress, CellRef};
use crate::formula::{BinaryOp, Expr, Function};

/// One coordinate of a normalized reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    /// Signed distance from the host cell.
    Relative(i64),
    /// Fixed sheet coordinate (`$` marker).
    Absolute(u32),
}

impl Axis {
    pub fn is_absolute(self) -> bool {
        matches!(self, Axis::Absolute(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormRef {
    pub col: Axis,
    pub row: Axis,
}

impl NormRef {
    pub fn from_ref(r: &CellRef, origin: CellAddress) -> Self {
        let axis = |v: u32, abs: bool, o: u32| {
            if abs {
                Axis::Absolute(v)
            } else {
                Axis::Relative(v as i64 - o as i64)
            }
        };
        NormRef {
            col: axis(r.col, r.col_absolute, origin.col),
            row: axis(r.row, r.row_absolute, origin.row),
        }
    }
}

impl fmt::Display for NormRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // R1C1-like: C[+1] relative, C$3 absolute.
        match self.col {
            Axis::Relative(d) => write!(f, "C[{d:+}]")?,
            Axis::Absolute(c) => write!(f, "C${}", column_name(c))?,
        }
        match self.row {
            Axis::Relative(d) => write!(f, "R[{d:+}]"),
            Axis::Absolute(r) => write!(f, "R${r}"),
        }
    }
}

/// Number literal compared by bit pattern so normalized formulas can be
/// hashed and grouped.
#[derive(Debug, Clone, Copy)]
pub struct Literal(pub f64);

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Literal {}

impl Hash for Literal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormalizedExpr {
    Number(Literal),
    Reference(NormRef),
    Range(NormRef, NormRef),
    Negate(Box<NormalizedExpr>),
    Binary {
        op: BinaryOp,
        left: Box<NormalizedExpr>,
        right: Box<NormalizedExpr>,
    },
    Call {
        function: Function,
        args: Vec<NormalizedExpr>,
    },
}

/// Rewrites relative axes as offsets from `origin`. Range bounds are
/// normalized independently and then put in a canonical order per axis.
pub fn normalize(expr: &Expr, origin: CellAddress) -> NormalizedExpr {
    match expr {
        Expr::Number(v) => NormalizedExpr::Number(Literal(*v)),
        Expr::Reference(r) => NormalizedExpr::Reference(NormRef::from_ref(r, origin)),
        Expr::Range(r) => {
            // Sort each axis pair so a copy whose relative and absolute
            // bounds cross over still normalizes to the same range.
            let (a, b) = (
                NormRef::from_ref(&r.start, origin),
                NormRef::from_ref(&r.end, origin),
            );
            NormalizedExpr::Range(
                NormRef {
                    col: a.col.min(b.col),
                    row: a.row.min(b.row),
                },
                NormRef {
                    col: a.col.max(b.col),
                    row: a.row.max(b.row),
                },
            )
        }
        Expr::Negate(e) => NormalizedExpr::Negate(Box::new(normalize(e, origin))),
        Expr::Binary { op, left, right } => NormalizedExpr::Binary {
            op: *op,
            left: Box::new(normalize(left, origin)),
            right: Box::new(normalize(right, origin)),
        },
        Expr::Call { function, args } => NormalizedExpr::Call {
            function: *function,
            args: args.iter().map(|a| normalize(a, origin)).collect(),
        },
    }
}

impl fmt::Display for NormalizedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizedExpr::Number(v) => write!(f, "{}", v.0),
            NormalizedExpr::Reference(r) => write!(f, "{r}"),
            NormalizedExpr::Range(a, b) => write!(f, "{a}:{b}"),
            NormalizedExpr::Negate(e) => write!(f, "-({e})"),
            NormalizedExpr::Binary { op, left, right } => {
                write!(f, "({left}{}{right})", op.symbol())
            }
            NormalizedExpr::Call { function, args } => {
                write!(f, "{function}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Skeleton {
    Number,
    Reference,
    Range,
    Negate(Box<Skeleton>),
    Binary {
        op: BinaryOp,
        left: Box<Skeleton>,
        right: Box<Skeleton>,
    },
    Call {
        function: Function,
        args: Vec<Skeleton>,
    },
}

pub fn skeleton(n: &NormalizedExpr) -> Skeleton {
    match n {
        NormalizedExpr::Number(_) => Skeleton::Number,
        NormalizedExpr::Reference(_) => Skeleton::Reference,
        NormalizedExpr::Range(..) => Skeleton::Range,
        NormalizedExpr::Negate(e) => Skeleton::Negate(Box::new(skeleton(e))),
        NormalizedExpr::Binary { op, left, right } => Skeleton::Binary {
            op: *op,
            left: Box::new(skeleton(left)),
            right: Box::new(skeleton(right)),
        },
        NormalizedExpr::Call { function, args } => Skeleton::Call {
            function: *function,
            args: args.iter().map(skeleton).collect(),
        },
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Skeleton::Number => f.write_str("Lit"),
            Skeleton::Reference => f.write_str("Ref"),
            Skeleton::Range => f.write_str("Range"),
            Skeleton::Negate(e) => write!(f, "-({e})"),
            Skeleton::Binary { op, left, right } => write!(f, "({left}{}{right})", op.symbol()),
            Skeleton::Call { function, args } => {
                write!(f, "{function}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn axis_differs_only_in_mode(a: Axis, b: Axis) -> bool {
    a == b || a.is_absolute() != b.is_absolute()
}

fn ref_differs_only_in_mode(a: &NormRef, b: &NormRef) -> bool {
    axis_differs_only_in_mode(a.col, b.col) && axis_differs_only_in_mode(a.row, b.row)
}

/// True when `a` and `b` have the same shape and every difference between
/// them is either a literal value or a reference axis whose `$` marker
/// differs. Two relative axes with different offsets do not qualify.
pub fn differs_only_in_modes_or_literals(a: &NormalizedExpr, b: &NormalizedExpr) -> bool {
    use NormalizedExpr as N;
    match (a, b) {
        (N::Number(_), N::Number(_)) => true,
        (N::Reference(x), N::Reference(y)) => ref_differs_only_in_mode(x, y),
        (N::Range(x0, x1), N::Range(y0, y1)) => {
            // Bounds are sorted per axis, so match each axis pair either way round.
            let pair = |a: (Axis, Axis), b: (Axis, Axis)| {
                (axis_differs_only_in_mode(a.0, b.0) && axis_differs_only_in_mode(a.1, b.1))
                    || (axis_differs_only_in_mode(a.0, b.1) && axis_differs_only_in_mode(a.1, b.0))
            };
            pair((x0.col, x1.col), (y0.col, y1.col)) && pair((x0.row, x1.row), (y0.row, y1.row))
        }
        (N::Negate(x), N::Negate(y)) => differs_only_in_modes_or_literals(x, y),
        (
            N::Binary {
                op: o1,
                left: l1,
                right: r1,
            },
            N::Binary {
                op: o2,
                left: l2,
                right: r2,
            },
        ) => {
            o1 == o2
                && differs_only_in_modes_or_literals(l1, l2)
                && differs_only_in_modes_or_literals(r1, r2)
        }
        (
            N::Call {
                function: f1,
                args: a1,
            },
            N::Call {
                function: f2,
                args: a2,
            },
        ) => {
            f1 == f2
                && a1.len() == a2.len()
                && a1
                    .iter()
                    .zip(a2)
                    .all(|(x, y)| differs_only_in_modes_or_literals(x, y))
        }
        _ => false,
    }
}
