//! Cross-field consistency rules of the form `when <predicate> expect <predicate>`.
//!
//! Predicate grammar:
//!
//! ```text
//! predicate := clause ("and" clause)*
//! clause    := column op literal | column "in" "{" literal ("," literal)* "}"
//! op        := "=" | "!=" | "<" | "<=" | ">" | ">="
//! column    := bare-word | "quoted name"
//! literal   := bare-word | "quoted text" | null
//! ```
//!
//! Literals are typed against the cell they are compared with: a number
//! cell parses the literal as a decimal, a date cell as an ISO date. A Null
//! cell satisfies only `= null`; every other comparison with Null is false.

use std::fmt;

use rust_decimal::Decimal;

use crate::model::{compare_values, CellValue, DateValue, Table, ValueOrdering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    fn as_str(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Null,
    /// Raw literal text; `quoted` records whether it was written in quotes.
    Raw {
        text: String,
        quoted: bool,
    },
}

impl Literal {
    pub fn bare(text: &str) -> Self {
        Literal::Raw {
            text: text.to_string(),
            quoted: false,
        }
    }

    /// Interprets the literal in the variant of `cell`; `None` if it does
    /// not parse as that variant.
    fn typed_like(&self, cell: &CellValue) -> Option<CellValue> {
        let Literal::Raw { text, .. } = self else {
            return Some(CellValue::Null);
        };
        match cell {
            CellValue::Null => None,
            CellValue::Number(_) => text.parse::<Decimal>().ok().map(CellValue::Number),
            CellValue::Text(_) => Some(CellValue::Text(text.clone())),
            CellValue::Date(_) => text.parse::<DateValue>().ok().map(CellValue::Date),
            CellValue::Boolean(_) => match text.to_ascii_lowercase().as_str() {
                "true" => Some(CellValue::Boolean(true)),
                "false" => Some(CellValue::Boolean(false)),
                _ => None,
            },
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Null => f.write_str("null"),
            Literal::Raw { text, quoted: true } => write!(f, "\"{}\"", text.replace('"', "\\\"")),
            Literal::Raw { text, quoted: false } => f.write_str(text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    Compare {
        column: String,
        op: CompareOp,
        literal: Literal,
    },
    In {
        column: String,
        set: Vec<Literal>,
    },
}

impl Clause {
    pub fn column(&self) -> &str {
        match self {
            Clause::Compare { column, .. } | Clause::In { column, .. } => column,
        }
    }

    fn eval(&self, cell: &CellValue) -> bool {
        match self {
            Clause::Compare { op, literal, .. } => compare_literal(cell, *op, literal),
            Clause::In { set, .. } => set.iter().any(|l| compare_literal(cell, CompareOp::Eq, l)),
        }
    }
}

fn compare_literal(cell: &CellValue, op: CompareOp, literal: &Literal) -> bool {
    if matches!(literal, Literal::Null) {
        return match op {
            CompareOp::Eq => cell.is_null(),
            CompareOp::Ne => !cell.is_null(),
            _ => false,
        };
    }
    let Some(lit) = literal.typed_like(cell) else {
        return false;
    };
    let ord = match (cell, &lit) {
        (CellValue::Text(a), CellValue::Text(b)) => a.trim().cmp(b.as_str()).into(),
        _ => compare_values(cell, &lit),
    };
    match ord {
        ValueOrdering::Incomparable => false,
        ValueOrdering::Less => matches!(op, CompareOp::Ne | CompareOp::Lt | CompareOp::Le),
        ValueOrdering::Equal => matches!(op, CompareOp::Eq | CompareOp::Le | CompareOp::Ge),
        ValueOrdering::Greater => matches!(op, CompareOp::Ne | CompareOp::Gt | CompareOp::Ge),
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Compare { column, op, literal } => {
                write!(f, "{} {} {}", quote_name(column), op.as_str(), literal)
            }
            Clause::In { column, set } => {
                write!(f, "{} in {{", quote_name(column))?;
                for (i, l) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str("}")
            }
        }
    }
}

fn quote_name(name: &str) -> String {
    if name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.') {
        name.to_string()
    } else {
        format!("\"{name}\"")
    }
}

/// A conjunction of clauses over one row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub clauses: Vec<Clause>,
}

impl Predicate {
    pub fn parse(text: &str) -> Result<Self, RuleParseError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let pred = parser.predicate()?;
        if let Some(tok) = parser.peek() {
            return Err(RuleParseError::new(
                tok.offset,
                format!("unexpected `{}`", tok.text),
            ));
        }
        Ok(pred)
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.clauses.iter().map(Clause::column)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// When `when` holds for a row, `expect` must hold too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyRule {
    pub name: String,
    pub when: Predicate,
    pub expect: Predicate,
}

impl ConsistencyRule {
    /// Parses `when <predicate> expect <predicate>`.
    pub fn parse(name: &str, body: &str) -> Result<Self, RuleParseError> {
        let tokens = tokenize(body)?;
        let when_kw = tokens
            .first()
            .filter(|t| !t.quoted && t.text == "when")
            .ok_or_else(|| RuleParseError::new(0, "rule must start with `when`"))?;
        let expect_at = tokens
            .iter()
            .position(|t| !t.quoted && t.text == "expect")
            .ok_or_else(|| RuleParseError::new(body.len(), "rule is missing `expect`"))?;
        let mut when = Parser {
            tokens: tokens[1..expect_at].to_vec(),
            pos: 0,
        };
        let when_pred = when.predicate_or_empty(when_kw.offset + 4)?;
        let mut expect = Parser {
            tokens: tokens[expect_at + 1..].to_vec(),
            pos: 0,
        };
        let expect_pred = expect.predicate_or_empty(tokens[expect_at].offset + 6)?;
        if let Some(tok) = expect.peek() {
            return Err(RuleParseError::new(
                tok.offset,
                format!("unexpected `{}`", tok.text),
            ));
        }
        Ok(Self {
            name: name.to_string(),
            when: when_pred,
            expect: expect_pred,
        })
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.when.columns().chain(self.expect.columns())
    }

    /// Resolves column names against a table.
    pub fn bind<'a>(&'a self, table: &Table) -> Result<BoundRule<'a>, String> {
        let resolve = |p: &'a Predicate| -> Result<Vec<(usize, &'a Clause)>, String> {
            p.clauses
                .iter()
                .map(|c| {
                    table
                        .column_index(c.column())
                        .map(|i| (i, c))
                        .ok_or_else(|| c.column().to_string())
                })
                .collect()
        };
        Ok(BoundRule {
            rule: self,
            when: resolve(&self.when)?,
            expect: resolve(&self.expect)?,
        })
    }
}

impl fmt::Display for ConsistencyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "when {} expect {}", self.when, self.expect)
    }
}

/// A rule whose columns have been resolved to indices of one table.
#[derive(Debug)]
pub struct BoundRule<'a> {
    pub rule: &'a ConsistencyRule,
    when: Vec<(usize, &'a Clause)>,
    expect: Vec<(usize, &'a Clause)>,
}

impl BoundRule<'_> {
    pub fn when_holds(&self, table: &Table, row: usize) -> bool {
        self.when
            .iter()
            .all(|(c, clause)| clause.eval(table.cell(row, *c)))
    }

    /// Clauses of `expect` that fail on this row.
    pub fn failed_expectations(&self, table: &Table, row: usize) -> Vec<usize> {
        self.expect
            .iter()
            .filter(|(c, clause)| !clause.eval(table.cell(row, *c)))
            .map(|(c, _)| *c)
            .collect()
    }

    /// Column indices cited by the rule, `when` columns first, without repeats.
    pub fn cited_columns(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (c, _) in self.when.iter().chain(&self.expect) {
            if !out.contains(c) {
                out.push(*c);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleParseError {
    /// Byte offset into the parsed text.
    pub offset: usize,
    pub message: String,
}

impl RuleParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

impl fmt::Display for RuleParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at offset {})", self.message, self.offset)
    }
}

impl std::error::Error for RuleParseError {}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    quoted: bool,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, RuleParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        match c {
            '"' => {
                chars.next();
                let mut buf = String::new();
                let mut closed = false;
                while let Some((_, c)) = chars.next() {
                    match c {
                        '\\' => {
                            if let Some((_, esc)) = chars.next() {
                                buf.push(esc);
                            }
                        }
                        '"' => {
                            closed = true;
                            break;
                        }
                        _ => buf.push(c),
                    }
                }
                if !closed {
                    return Err(RuleParseError::new(start, "unterminated quote"));
                }
                out.push(Token {
                    text: buf,
                    quoted: true,
                    offset: start,
                });
            }
            '{' | '}' | ',' => {
                chars.next();
                out.push(Token {
                    text: c.to_string(),
                    quoted: false,
                    offset: start,
                });
            }
            '=' | '!' | '<' | '>' => {
                chars.next();
                let mut op = c.to_string();
                if let Some(&(_, '=')) = chars.peek() {
                    chars.next();
                    op.push('=');
                }
                if op == "!" {
                    return Err(RuleParseError::new(start, "expected `!=`"));
                }
                out.push(Token {
                    text: op,
                    quoted: false,
                    offset: start,
                });
            }
            _ => {
                let mut buf = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || "{},=!<>\"".contains(c) {
                        break;
                    }
                    buf.push(c);
                    chars.next();
                }
                out.push(Token {
                    text: buf,
                    quoted: false,
                    offset: start,
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<Token, RuleParseError> {
        let end = self.tokens.last().map_or(0, |t| t.offset + t.text.len());
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| RuleParseError::new(end, format!("expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn predicate_or_empty(&mut self, offset: usize) -> Result<Predicate, RuleParseError> {
        if self.tokens.is_empty() {
            return Err(RuleParseError::new(offset, "empty predicate"));
        }
        self.predicate()
    }

    fn predicate(&mut self) -> Result<Predicate, RuleParseError> {
        let mut clauses = vec![self.clause()?];
        while matches!(self.peek(), Some(t) if !t.quoted && t.text == "and") {
            self.pos += 1;
            clauses.push(self.clause()?);
        }
        Ok(Predicate { clauses })
    }

    fn clause(&mut self) -> Result<Clause, RuleParseError> {
        let col = self.next("a column name")?;
        if !col.quoted && (col.text.is_empty() || "{},=!<>".contains(col.text.as_str())) {
            return Err(RuleParseError::new(col.offset, "expected a column name"));
        }
        let op = self.next("an operator")?;
        let op_kind = match (op.quoted, op.text.as_str()) {
            (false, "=") => CompareOp::Eq,
            (false, "!=") => CompareOp::Ne,
            (false, "<") => CompareOp::Lt,
            (false, "<=") => CompareOp::Le,
            (false, ">") => CompareOp::Gt,
            (false, ">=") => CompareOp::Ge,
            (false, "in") => {
                let open = self.next("`{`")?;
                if open.text != "{" || open.quoted {
                    return Err(RuleParseError::new(open.offset, "expected `{`"));
                }
                let mut set = Vec::new();
                loop {
                    let tok = self.next("a literal or `}`")?;
                    if !tok.quoted && tok.text == "}" {
                        break;
                    }
                    set.push(literal(&tok)?);
                    let sep = self.next("`,` or `}`")?;
                    match (sep.quoted, sep.text.as_str()) {
                        (false, ",") => continue,
                        (false, "}") => break,
                        _ => return Err(RuleParseError::new(sep.offset, "expected `,` or `}`")),
                    }
                }
                if set.is_empty() {
                    return Err(RuleParseError::new(open.offset, "empty value set"));
                }
                return Ok(Clause::In {
                    column: col.text,
                    set,
                });
            }
            _ => {
                return Err(RuleParseError::new(
                    op.offset,
                    format!("unknown operator `{}`", op.text),
                ))
            }
        };
        let lit = literal(&self.next("a literal")?)?;
        Ok(Clause::Compare {
            column: col.text,
            op: op_kind,
            literal: lit,
        })
    }
}

fn literal(tok: &Token) -> Result<Literal, RuleParseError> {
    if tok.quoted {
        return Ok(Literal::Raw {
            text: tok.text.clone(),
            quoted: true,
        });
    }
    if tok.text.is_empty() || "{},=!<>".contains(tok.text.as_str()) {
        return Err(RuleParseError::new(tok.offset, "expected a literal"));
    }
    if tok.text.eq_ignore_ascii_case("null") {
        return Ok(Literal::Null);
    }
    Ok(Literal::bare(&tok.text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Table;

    fn people() -> Table {
        Table::from_rows(
            "people",
            ["first_name", "gender", "age"],
            vec![
                vec!["John".into(), "F".into(), 30.into()],
                vec!["John".into(), "M".into(), 15.into()],
                vec!["Mary".into(), "F".into(), CellValue::Null],
            ],
        )
        .unwrap()
    }

    #[test]
    fn parses_and_prints() {
        let r =
            ConsistencyRule::parse("r", r#"when first_name in {John, "Jon"} expect gender = "M""#).unwrap();
        assert_eq!(
            r.to_string(),
            r#"when first_name in {John, "Jon"} expect gender = "M""#
        );
        let p = Predicate::parse("age >= 18 and \"full name\" != null").unwrap();
        assert_eq!(p.clauses.len(), 2);
        assert_eq!(p.to_string(), "age >= 18 and \"full name\" != null");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = ConsistencyRule::parse("r", "when a = 1").unwrap_err();
        assert!(e.message.contains("expect"));
        let e = Predicate::parse("a ~ 1").unwrap_err();
        assert_eq!(e.offset, 2);
        let e = Predicate::parse("a in {}").unwrap_err();
        assert!(e.message.contains("empty"));
        assert!(Predicate::parse("a = \"open").is_err());
    }

    #[test]
    fn evaluates_john_rule() {
        let t = people();
        let r = ConsistencyRule::parse("john", r#"when first_name in {John} expect gender = "M""#).unwrap();
        let b = r.bind(&t).unwrap();
        assert!(b.when_holds(&t, 0));
        assert_eq!(b.failed_expectations(&t, 0), vec![1]);
        assert!(b.failed_expectations(&t, 1).is_empty());
        assert!(!b.when_holds(&t, 2));
    }

    #[test]
    fn numeric_and_null_literals() {
        let t = people();
        let p = Predicate::parse("age < 18").unwrap();
        let r = ConsistencyRule {
            name: "x".into(),
            when: p.clone(),
            expect: p,
        };
        let b = r.bind(&t).unwrap();
        assert!(!b.when_holds(&t, 0));
        assert!(b.when_holds(&t, 1));
        assert!(!b.when_holds(&t, 2), "null never compares");
        let r = ConsistencyRule::parse("n", "when age = null expect gender = F").unwrap();
        let b = r.bind(&t).unwrap();
        assert!(b.when_holds(&t, 2));
    }

    #[test]
    fn bind_reports_unknown_column() {
        let t = people();
        let r = ConsistencyRule::parse("r", "when surname = x expect gender = M").unwrap();
        assert_eq!(r.bind(&t).unwrap_err(), "surname");
    }
}
