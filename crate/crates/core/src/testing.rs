//! Random programs and fault injectors for property tests and benchmarks.
//!
//! Everything is driven by a caller-supplied RNG, so a seed reproduces a
//! program exactly.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::address::{CellAddress, CellRef, RangeRef};
use crate::detect::Code;
use crate::formula::{BinaryOp, Expr, Function};
use crate::interval::Interval;
use crate::oracle::IntervalSpec;
use crate::sheet::{CellContent, SpreadsheetProgram};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Upper bound on non-empty cells.
    pub max_cells: usize,
    /// Width of the grid cells are laid out on.
    pub columns: u32,
    pub max_depth: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_cells: 100,
            columns: 8,
            max_depth: 3,
        }
    }
}

struct ProgramGen<'a, R: Rng> {
    rng: &'a mut R,
    config: &'a GenConfig,
    /// Cells laid out so far, in row-major order.
    earlier: Vec<CellAddress>,
    program: SpreadsheetProgram,
}

impl<R: Rng> ProgramGen<'_, R> {
    fn literal(&mut self) -> Expr {
        // Quarter steps keep values exactly representable.
        Expr::Number(self.rng.gen_range(0..=40) as f64 / 4.0)
    }

    fn reference(&mut self) -> Expr {
        let a = *self.earlier.choose(self.rng).expect("non-empty");
        Expr::Reference(CellRef::relative(a))
    }

    fn is_formula(&self, e: &Expr) -> bool {
        match e {
            Expr::Reference(r) => matches!(self.program.get(r.address()), CellContent::Formula(_)),
            Expr::Number(_) => false,
            _ => true,
        }
    }

    /// A range made only of cells before `at`.
    fn range(&mut self, at: CellAddress) -> Option<RangeRef> {
        let cols = self.config.columns;
        if at.row > 1 && self.rng.gen_bool(0.7) {
            let r1 = self.rng.gen_range(1..at.row);
            let r2 = self.rng.gen_range(r1..at.row.min(r1 + 6));
            let c1 = self.rng.gen_range(1..=cols);
            let c2 = self.rng.gen_range(c1..=cols.min(c1 + 2));
            Some(RangeRef::new(
                CellRef::relative(CellAddress::new(c1, r1)),
                CellRef::relative(CellAddress::new(c2, r2)),
            ))
        } else if at.col > 1 {
            let c1 = self.rng.gen_range(1..at.col);
            let c2 = self.rng.gen_range(c1..at.col);
            Some(RangeRef::new(
                CellRef::relative(CellAddress::new(c1, at.row)),
                CellRef::relative(CellAddress::new(c2, at.row)),
            ))
        } else {
            None
        }
    }

    fn expr(&mut self, at: CellAddress, depth: u32) -> Expr {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        if leaf {
            return if self.rng.gen_bool(0.75) {
                self.reference()
            } else {
                self.literal()
            };
        }
        match self.rng.gen_range(0..10) {
            0 => Expr::Negate(Box::new(self.expr(at, depth - 1))),
            1..=3 => {
                if let Some(range) = self.range(at) {
                    let function = *Function::ALL.choose(self.rng).unwrap();
                    let mut args = vec![Expr::Range(range)];
                    if self.rng.gen_bool(0.2) {
                        args.push(self.expr(at, depth - 1));
                    }
                    Expr::Call { function, args }
                } else {
                    self.reference()
                }
            }
            _ => {
                let op = *[BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div]
                    .choose(self.rng)
                    .unwrap();
                let left = self.expr(at, depth - 1);
                let mut right = self.expr(at, depth - 1);
                // Products and quotients of two computed values can grow
                // without bound over a long chain; keep one side a leaf.
                if matches!(op, BinaryOp::Mul | BinaryOp::Div) && self.is_formula(&left) && self.is_formula(&right) {
                    right = self.literal();
                }
                if matches!(op, BinaryOp::Div) {
                    if let Expr::Number(v) = right {
                        right = Expr::Number(v + 1.0);
                    }
                }
                Expr::binary(op, left, right)
            }
        }
    }

    fn formula(&mut self, at: CellAddress) -> Expr {
        let depth = self.config.max_depth;
        loop {
            let e = self.expr(at, depth);
            if !e.references().is_empty() {
                return e;
            }
        }
    }
}

/// A random acyclic program: every formula only reads cells that come
/// before it in row-major order. Literals are non-negative; negative values
/// arise through negation, inputs and constants.
pub fn random_program(rng: &mut impl Rng, config: &GenConfig) -> SpreadsheetProgram {
    let target = rng.gen_range(config.max_cells / 2..=config.max_cells).max(1);
    let mut g = ProgramGen {
        rng,
        config,
        earlier: Vec::new(),
        program: SpreadsheetProgram::new(),
    };
    let mut idx = 0u32;
    while g.program.len() < target {
        let at = CellAddress::new(idx % config.columns + 1, idx / config.columns + 1);
        idx += 1;
        let roll = g.rng.gen_range(0..100);
        let content = if g.earlier.is_empty() || roll < 25 {
            CellContent::Input(g.rng.gen_range(-40..=40) as f64 / 4.0)
        } else if roll < 35 {
            CellContent::Constant(g.rng.gen_range(-40..=40) as f64 / 4.0)
        } else if roll < 40 {
            CellContent::Label(format!("L{idx}"))
        } else if roll < 47 {
            // left empty, but still eligible as a reference target
            g.earlier.push(at);
            continue;
        } else {
            CellContent::Formula(g.formula(at))
        };
        g.program.set(at, content);
        g.earlier.push(at);
    }
    g.program
}

/// Ranges around each input's default, with quarter-step endpoints.
pub fn random_spec(rng: &mut impl Rng, program: &SpreadsheetProgram) -> IntervalSpec {
    let mut spec = IntervalSpec::new();
    for (a, v) in program.inputs() {
        let below = rng.gen_range(0..=20) as f64 / 4.0;
        let above = rng.gen_range(0..=20) as f64 / 4.0;
        spec.input_ranges
            .insert(a, Interval::new(v - below, v + above).expect("ordered"));
    }
    spec
}

/// One point per input range, on the quarter grid.
pub fn sample_inputs(rng: &mut impl Rng, spec: &IntervalSpec) -> Vec<(CellAddress, f64)> {
    spec.input_ranges
        .iter()
        .map(|(a, i)| {
            let steps = ((i.hi() - i.lo()) * 4.0).round() as i64;
            let k = rng.gen_range(0..=steps);
            (*a, (i.lo() + k as f64 / 4.0).clamp(i.lo(), i.hi()))
        })
        .collect()
}

/// A column of inputs summed a gap row below.
#[derive(Debug, Clone)]
pub struct SumBlock {
    pub col: u32,
    pub first_row: u32,
    pub last_row: u32,
    pub consumer: CellAddress,
}

/// Two blocks in one column and a grand total adding their subtotals.
#[derive(Debug, Clone)]
pub struct TotalGroup {
    pub blocks: [SumBlock; 2],
    pub total: CellAddress,
}

/// A column of copied formulas reading the inputs to its left.
#[derive(Debug, Clone)]
pub struct CopyColumn {
    pub members: Vec<CellAddress>,
}

/// A well-formed sheet plus the layout facts the injectors rely on.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub program: SpreadsheetProgram,
    pub groups: Vec<TotalGroup>,
    pub copies: Vec<CopyColumn>,
}

const COPY_TOP: u32 = 40;

fn input(rng: &mut impl Rng) -> CellContent {
    CellContent::Input(rng.gen_range(1..=200) as f64 * 5.0)
}

fn sum_block(program: &mut SpreadsheetProgram, rng: &mut impl Rng, col: u32, first_row: u32) -> SumBlock {
    let n = rng.gen_range(3..=6);
    let last_row = first_row + n - 1;
    for row in first_row..=last_row {
        program.set(CellAddress::new(col, row), input(rng));
    }
    let consumer = CellAddress::new(col, last_row + 2);
    let range = RangeRef::new(
        CellRef::relative(CellAddress::new(col, first_row)),
        CellRef::relative(CellAddress::new(col, last_row)),
    );
    program.set(
        consumer,
        CellContent::Formula(Expr::Call {
            function: Function::Sum,
            args: vec![Expr::Range(range)],
        }),
    );
    SumBlock {
        col,
        first_row,
        last_row,
        consumer,
    }
}

/// A clean fixture: a few labelled columns of subtotals and totals, and a
/// few columns of copied formulas further down. No detector fires on it.
pub fn clean_fixture(rng: &mut impl Rng) -> Fixture {
    let mut program = SpreadsheetProgram::new();
    let mut groups = Vec::new();
    let ncols = rng.gen_range(1..=3);
    for k in 0..ncols {
        let col = 1 + 2 * k;
        program.set(CellAddress::new(col, 1), CellContent::Label(format!("Region {}", k + 1)));
        let a = sum_block(&mut program, rng, col, 2);
        let b = sum_block(&mut program, rng, col, a.consumer.row + 2);
        let total = CellAddress::new(col, b.consumer.row + 2);
        program.set(
            total,
            CellContent::Formula(Expr::binary(
                BinaryOp::Add,
                Expr::Reference(CellRef::relative(a.consumer)),
                Expr::Reference(CellRef::relative(b.consumer)),
            )),
        );
        groups.push(TotalGroup { blocks: [a, b], total });
    }

    let mut copies = Vec::new();
    let ncopies = rng.gen_range(1..=2);
    for k in 0..ncopies {
        let base = 1 + 4 * k;
        let n = rng.gen_range(5..=8);
        let factor = rng.gen_range(1..=9) as f64;
        let op = if k % 2 == 0 { BinaryOp::Mul } else { BinaryOp::Add };
        let mut members = Vec::new();
        for row in COPY_TOP..COPY_TOP + n {
            let x = CellAddress::new(base, row);
            let y = CellAddress::new(base + 1, row);
            program.set(x, input(rng));
            program.set(y, input(rng));
            let at = CellAddress::new(base + 2, row);
            let e = Expr::binary(
                BinaryOp::Add,
                Expr::binary(
                    op,
                    Expr::Reference(CellRef::relative(x)),
                    Expr::Reference(CellRef::relative(y)),
                ),
                Expr::Number(factor),
            );
            program.set(at, CellContent::Formula(e));
            members.push(at);
        }
        copies.push(CopyColumn { members });
    }
    Fixture {
        program,
        groups,
        copies,
    }
}

/// A seeded fault: the mutated program and the cell the matching detector
/// must flag.
#[derive(Debug, Clone)]
pub struct Injection {
    pub code: Code,
    pub program: SpreadsheetProgram,
    pub location: CellAddress,
}

fn pick_block<'a>(rng: &mut impl Rng, f: &'a Fixture) -> &'a SumBlock {
    let g = f.groups.choose(rng).expect("fixture has groups");
    &g.blocks[rng.gen_range(0..2)]
}

/// Empties one cell inside a summed range.
pub fn inject_blank_ref(rng: &mut impl Rng, f: &Fixture) -> Injection {
    let b = pick_block(rng, f);
    let at = CellAddress::new(b.col, rng.gen_range(b.first_row..=b.last_row));
    let mut program = f.program.clone();
    program.set(at, CellContent::Empty);
    Injection {
        code: Code::BlankRef,
        program,
        location: at,
    }
}

/// Turns one summed value into a label.
pub fn inject_label_in_range(rng: &mut impl Rng, f: &Fixture) -> Injection {
    let b = pick_block(rng, f);
    let at = CellAddress::new(b.col, rng.gen_range(b.first_row..=b.last_row));
    let mut program = f.program.clone();
    program.set(at, CellContent::Label("Subtotal".into()));
    Injection {
        code: Code::WrongTypeInRange,
        program,
        location: at,
    }
}

/// Adds a value right after a summed range without widening the range.
pub fn inject_beyond_range(rng: &mut impl Rng, f: &Fixture) -> Injection {
    let b = pick_block(rng, f);
    let at = CellAddress::new(b.col, b.last_row + 1);
    let mut program = f.program.clone();
    program.set(at, input(rng));
    Injection {
        code: Code::IncorrectRange,
        program,
        location: at,
    }
}

/// Replaces a grand total by a `+` chain over every cell of both areas.
pub fn inject_plus_chain(rng: &mut impl Rng, f: &Fixture) -> Injection {
    let g = f.groups.choose(rng).expect("fixture has groups");
    let terms: Vec<Expr> = g
        .blocks
        .iter()
        .flat_map(|b| (b.first_row..=b.last_row).map(move |row| CellAddress::new(b.col, row)))
        .map(|a| Expr::Reference(CellRef::relative(a)))
        .collect();
    let chain = terms
        .into_iter()
        .reduce(|acc, t| Expr::binary(BinaryOp::Add, acc, t))
        .expect("non-empty");
    let mut program = f.program.clone();
    program.set(g.total, CellContent::Formula(chain));
    Injection {
        code: Code::AreaMixup,
        program,
        location: g.total,
    }
}

/// Overwrites an inner copy with its current value as a constant.
pub fn inject_constant_overwrite(rng: &mut impl Rng, f: &Fixture) -> Injection {
    let c = f.copies.choose(rng).expect("fixture has copies");
    let at = c.members[rng.gen_range(1..c.members.len() - 1)];
    let mut program = f.program.clone();
    program.set(at, CellContent::Constant(rng.gen_range(1..=100) as f64));
    Injection {
        code: Code::ConstantOverwrite,
        program,
        location: at,
    }
}

fn make_absolute(e: &Expr, which: usize, seen: &mut usize) -> Expr {
    match e {
        Expr::Reference(r) => {
            let hit = *seen == which;
            *seen += 1;
            if hit {
                Expr::Reference(CellRef::absolute(r.address()))
            } else {
                e.clone()
            }
        }
        Expr::Negate(inner) => Expr::Negate(Box::new(make_absolute(inner, which, seen))),
        Expr::Binary { op, left, right } => {
            let l = make_absolute(left, which, seen);
            let r = make_absolute(right, which, seen);
            Expr::binary(*op, l, r)
        }
        Expr::Call { function, args } => Expr::Call {
            function: *function,
            args: args.iter().map(|a| make_absolute(a, which, seen)).collect(),
        },
        other => other.clone(),
    }
}

/// Marks one reference of one copy absolute.
pub fn inject_abs_flip(rng: &mut impl Rng, f: &Fixture) -> Injection {
    let c = f.copies.choose(rng).expect("fixture has copies");
    let at = *c.members.choose(rng).unwrap();
    let expr = f.program.get(at).formula().expect("copy is a formula");
    let n = expr.referenced_cells().len();
    let flipped = make_absolute(expr, rng.gen_range(0..n), &mut 0);
    let mut program = f.program.clone();
    program.set(at, CellContent::Formula(flipped));
    Injection {
        code: Code::CopyMisreference,
        program,
        location: at,
    }
}

/// Every injector, in code order.
pub fn inject(code: Code, rng: &mut impl Rng, f: &Fixture) -> Option<Injection> {
    Some(match code {
        Code::BlankRef => inject_blank_ref(rng, f),
        Code::WrongTypeInRange => inject_label_in_range(rng, f),
        Code::IncorrectRange => inject_beyond_range(rng, f),
        Code::AreaMixup => inject_plus_chain(rng, f),
        Code::ConstantOverwrite => inject_constant_overwrite(rng, f),
        Code::CopyMisreference => inject_abs_flip(rng, f),
        Code::Cycle | Code::DivZero => return None,
    })
}
