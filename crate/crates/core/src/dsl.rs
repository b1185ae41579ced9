//! Text syntax for field elements, irreducibles, classes, generic
//! representations, fusion tables and matrix dumps.
//!
//! Every printer in the crate emits text these parsers accept, so output
//! round-trips. Parse errors carry a byte offset into the input.

use crate::deligne::{normalize, DeligneClass, RawIndec};
use crate::error::{Error, Result};
use crate::field::{make_ctx, FieldCtx, FieldElem};
use crate::gln::{normalize_rep, GenericRep, RawSegment};
use crate::matrix::Matrix;
use crate::matrixmodel::MatrixDeligne;
use crate::weil::{AbstractIrr, FusionTable, IrredRep};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    /// Declared abstract irreducibles, for resolving bare labels.
    table: Option<&'a FusionTable>,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, table: Option<&'a FusionTable>) -> Self {
        Cursor { src, pos: 0, table }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.pos, msg))
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return self.err("expected identifier");
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    /// Consumes `name` only when it is followed by `next`.
    fn keyword_before(&mut self, name: &str, next: char) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if let Some(after) = rest.strip_prefix(name) {
            if after.trim_start().starts_with(next) {
                self.pos += name.len();
                return true;
            }
        }
        false
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let rest = self.rest();
        let sign = usize::from(rest.starts_with('-'));
        let digits = rest[sign..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len() - sign);
        if digits == 0 {
            return self.err("expected integer");
        }
        let text = &rest[..sign + digits];
        let v = text.parse().or_else(|_| self.err("integer out of range"))?;
        self.pos += text.len();
        Ok(v)
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        let v = self.int()?;
        u32::try_from(v).map_err(|_| Error::parse(start, "expected a non-negative integer"))
    }

    fn key_int(&mut self, key: &str) -> Result<i64> {
        self.expect(key)?;
        self.expect("=")?;
        self.int()
    }

    fn key_uint(&mut self, key: &str) -> Result<u32> {
        self.expect(key)?;
        self.expect("=")?;
        self.uint()
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn elem(&mut self, ctx: &FieldCtx) -> Result<FieldElem> {
        let start = self.pos;
        if !self.eat("[") {
            return Ok(ctx.from_int(self.int()?));
        }
        let mut coeffs = vec![self.int()?];
        while self.eat(",") {
            coeffs.push(self.int()?);
        }
        self.expect("]")?;
        if self.eat("@F(") {
            let ell = self.int()?;
            self.expect("^")?;
            let k = self.int()?;
            self.expect(")")?;
            if ell as u64 != ctx.ell() || k as u32 != ctx.ext_deg() {
                return Err(Error::parse(start, "element belongs to a different field"));
            }
        }
        ctx.from_coeffs(&coeffs).map_err(|e| Error::parse(start, e.to_string()))
    }

    fn irr(&mut self, ctx: &FieldCtx) -> Result<IrredRep> {
        let start = self.pos;
        if self.keyword_before("chi", '(') {
            self.expect("(")?;
            self.expect("t")?;
            self.expect("=")?;
            let t = self.elem(ctx)?;
            self.expect(")")?;
            if t.is_zero() {
                return Err(Error::parse(start, "character value must be nonzero"));
            }
            return Ok(IrredRep::unram(t));
        }
        if self.keyword_before("irr", '(') {
            self.expect("(")?;
            let label = self.ident()?.to_string();
            self.expect(",")?;
            let dim = self.key_uint("dim")?;
            self.expect(",")?;
            let order = self.key_uint("ord")?;
            self.expect(",")?;
            self.expect("dual")?;
            self.expect("=")?;
            let dual_label = self.ident()?.to_string();
            let twist = if self.eat(",") {
                self.expect("u")?;
                self.expect("=")?;
                self.elem(ctx)?
            } else {
                ctx.one()
            };
            self.expect(")")?;
            let irr = IrredRep::Abstract(AbstractIrr {
                label,
                dim,
                order,
                dual_label,
                twist,
            });
            irr.validate(ctx).map_err(|e| Error::parse(start, e.to_string()))?;
            return Ok(irr);
        }
        let label = self.ident()?;
        match self.table.and_then(|t| t.decl(label)) {
            Some(decl) => Ok(IrredRep::Abstract(decl.clone())),
            None => Err(Error::parse(start, format!("unknown irreducible `{label}`"))),
        }
    }

    fn line(&mut self, ctx: &FieldCtx) -> Result<IrredRep> {
        if self.keyword_before("line", '(') {
            self.expect("(")?;
            let irr = self.irr(ctx)?;
            self.expect(")")?;
            Ok(irr)
        } else {
            self.irr(ctx)
        }
    }

    fn multiplicity(&mut self) -> Result<u64> {
        if self.eat("*") {
            let start = self.pos;
            let m = self.uint()?;
            if m == 0 {
                return Err(Error::parse(start, "multiplicity must be positive"));
            }
            Ok(m as u64)
        } else {
            Ok(1)
        }
    }

    fn positive(&mut self, key: &str) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        let r = self.key_uint(key)?;
        if r == 0 {
            return Err(Error::parse(start, format!("`{key}` must be positive")));
        }
        Ok(r)
    }

    fn indec(&mut self, ctx: &FieldCtx) -> Result<(RawIndec, u64)> {
        let raw = if self.keyword_before("seg", '(') {
            self.expect("(")?;
            let irr = self.irr(ctx)?;
            self.expect(";")?;
            let r = self.positive("r")?;
            self.expect(";")?;
            let a = self.key_int("a")?;
            self.expect(")")?;
            RawIndec::Seg { irr, r, a }
        } else if self.keyword_before("cyc", '(') {
            self.expect("(")?;
            let irr = self.line(ctx)?;
            self.expect(";")?;
            let r = self.positive("r")?;
            self.expect(")")?;
            RawIndec::Cyc { irr, r }
        } else {
            return self.err("expected `seg(` or `cyc(`");
        };
        Ok((raw, self.multiplicity()?))
    }

    fn gl_segment(&mut self, ctx: &FieldCtx) -> Result<(RawSegment, u64)> {
        let raw = if self.keyword_before("stk", '(') {
            self.expect("(")?;
            self.expect("line")?;
            self.expect("=")?;
            let irr = self.line(ctx)?;
            self.expect(",")?;
            let k = self.key_uint("k")?;
            self.expect(";")?;
            let r = self.positive("r")?;
            self.expect(")")?;
            RawSegment::Stk { irr, k, r }
        } else if self.keyword_before("st", '(') {
            self.expect("(")?;
            let r = self.positive("r")?;
            self.expect(";")?;
            self.expect("cusp")?;
            self.expect("=")?;
            let irr = self.irr(ctx)?;
            let a = if self.eat(";") { self.key_int("a")? } else { 0 };
            self.expect(")")?;
            RawSegment::St { irr, r, a }
        } else {
            return self.err("expected `st(` or `stk(`");
        };
        Ok((raw, self.multiplicity()?))
    }

    /// `{ item, ... }`, or one bare item.
    fn list<T>(
        &mut self,
        open: &str,
        item: impl Fn(&mut Self) -> Result<T>,
    ) -> Result<Vec<T>> {
        if !self.eat(open) {
            return Ok(vec![item(self)?]);
        }
        let mut out = Vec::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }
}

/// Parses a field element: an integer, or `[c0,...]` with optional `@F(l^k)`.
pub fn parse_elem(ctx: &FieldCtx, src: &str) -> Result<FieldElem> {
    let mut c = Cursor::new(src, None);
    let v = c.elem(ctx)?;
    c.finish()?;
    Ok(v)
}

pub fn parse_irr(ctx: &FieldCtx, src: &str, table: &FusionTable) -> Result<IrredRep> {
    let mut c = Cursor::new(src, Some(table));
    let v = c.irr(ctx)?;
    c.finish()?;
    Ok(v)
}

pub fn parse_raw_class(
    ctx: &FieldCtx,
    src: &str,
    table: &FusionTable,
) -> Result<Vec<(RawIndec, u64)>> {
    let mut c = Cursor::new(src, Some(table));
    let items = c.list("{", |c| c.indec(ctx))?;
    c.finish()?;
    Ok(items)
}

/// Parses and normalizes a class such as `{ seg(chi(t=1); r=2; a=0)*2 }`.
pub fn parse_class(ctx: &FieldCtx, src: &str, table: &FusionTable) -> Result<DeligneClass> {
    normalize(ctx, &parse_raw_class(ctx, src, table)?)
}

pub fn parse_raw_rep(
    ctx: &FieldCtx,
    src: &str,
    table: &FusionTable,
) -> Result<Vec<(RawSegment, u64)>> {
    let mut c = Cursor::new(src, Some(table));
    let items = if c.eat("prod") {
        c.expect("{")?;
        c.pos -= 1;
        c.list("{", |c| c.gl_segment(ctx))?
    } else {
        vec![c.gl_segment(ctx)?]
    };
    c.finish()?;
    Ok(items)
}

/// Parses and normalizes a representation such as `prod{ st(r=2; cusp=chi(t=1); a=0) }`.
pub fn parse_rep(ctx: &FieldCtx, src: &str, table: &FusionTable) -> Result<GenericRep> {
    normalize_rep(ctx, &parse_raw_rep(ctx, src, table)?)
}

/// Line-oriented fusion data:
///
/// ```text
/// IRR a dim=2 ord=4 dual=b
/// FUSE a b -> (0,c) (1,chi(t=2))
/// ```
///
/// Blank lines and `#` comments are ignored. Positions in errors are byte
/// offsets into the whole file.
pub fn parse_fusion_file(ctx: &FieldCtx, src: &str) -> Result<FusionTable> {
    let mut table = FusionTable::new();
    let mut offset = 0;
    for raw_line in src.split_inclusive('\n') {
        let line_start = offset;
        offset += raw_line.len();
        let body = raw_line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let mut c = Cursor::new(&src[..line_start + body.len()], Some(&table));
        c.pos = line_start;
        let at = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::parse(line_start, other.to_string()),
        };
        if c.eat("IRR") {
            let label = c.ident()?.to_string();
            let dim = c.key_uint("dim")?;
            let order = c.key_uint("ord")?;
            c.expect("dual")?;
            c.expect("=")?;
            let dual_label = c.ident()?.to_string();
            c.finish()?;
            let irr = AbstractIrr {
                label,
                dim,
                order,
                dual_label,
                twist: ctx.one(),
            };
            table.declare(ctx, irr).map_err(at)?;
        } else if c.eat("FUSE") {
            let a = c.ident()?.to_string();
            let b = c.ident()?.to_string();
            c.expect("->")?;
            let mut entries = Vec::new();
            while c.eat("(") {
                let k = c.int()?;
                c.expect(",")?;
                let irr = c.irr(ctx)?;
                c.expect(")")?;
                entries.push((k, irr));
            }
            c.finish()?;
            table.add_rule(&a, &b, entries).map_err(at)?;
        } else {
            return c.err("expected `IRR` or `FUSE`");
        }
    }
    table.validate()?;
    Ok(table)
}

/// Context named by the header line of a matrix dump.
pub fn dump_context(src: &str) -> Result<FieldCtx> {
    let start = src.len() - src.trim_start().len();
    let header = src.trim_start().lines().next().unwrap_or("");
    let mut c = Cursor::new(&src[..start + header.len()], None);
    c.pos = start;
    c.expect("ctx")?;
    let ell = c.key_uint("ell")?;
    let q = c.key_uint("q")?;
    let k = c.key_uint("k")?;
    c.finish()?;
    make_ctx(ell as u64, q as u64, k).map_err(|e| Error::parse(start, e.to_string()))
}

/// Parses the output of [`MatrixDeligne::render`]; the header must match `ctx`.
pub fn parse_matrix_dump(ctx: &FieldCtx, src: &str) -> Result<MatrixDeligne> {
    let mut lines = Vec::new();
    let mut offset = 0;
    for l in src.split_inclusive('\n') {
        if !l.trim().is_empty() {
            lines.push((offset + (l.len() - l.trim_start().len()), l.trim()));
        }
        offset += l.len();
    }
    let Some(&(pos, header)) = lines.first() else {
        return Err(Error::parse(0, "empty matrix dump"));
    };
    if header != ctx.header() {
        return Err(Error::parse(
            pos,
            format!("header `{header}` does not match `{}`", ctx.header()),
        ));
    }
    let mut blocks: Vec<(&str, Vec<Vec<FieldElem>>)> = Vec::new();
    for &(pos, l) in &lines[1..] {
        if l == "F:" || l == "U:" {
            blocks.push((l, Vec::new()));
            continue;
        }
        let Some(block) = blocks.last_mut() else {
            return Err(Error::parse(pos, "expected `F:`"));
        };
        let mut row = Vec::new();
        let mut c = Cursor::new(&src[..pos + l.len()], None);
        c.pos = pos;
        while c.peek().is_some() {
            row.push(c.elem(ctx)?);
        }
        block.1.push(row);
    }
    let names: Vec<&str> = blocks.iter().map(|b| b.0).collect();
    if names != ["F:", "U:"] {
        return Err(Error::parse(src.len(), "expected an `F:` block followed by a `U:` block"));
    }
    let mut mats = blocks.into_iter().map(|(_, rows)| {
        if rows.is_empty() {
            Ok(Matrix::zeros(0, 0))
        } else {
            Matrix::from_rows(rows)
        }
    });
    let f = mats.next().expect("two blocks")?;
    let u = mats.next().expect("two blocks")?;
    Ok(MatrixDeligne::new(ctx, f, u))
}
