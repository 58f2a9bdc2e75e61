//! OpenQASM 2.0 subset: parsing and emission.
//!
//! Supported statements: `OPENQASM 2.0;`, `include "qelib1.inc";` (no-op),
//! `qreg`, `creg`, the gates of [`GateKind`], `measure a -> b;`, `reset a;`
//! and `barrier ...;`. Register arguments broadcast as in the standard.
//! Measurements into the reserved register `vsign` are sign-marked.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::error::{Error, Result};

/// Classical register name used for sign-marked measurements.
pub const SIGN_REGISTER: &str = "vsign";

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Sym(char),
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let syntax = |line, column, message: String| Error::Syntax {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(s),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s
                .parse()
                .map_err(|_| syntax(tl, tc, format!("malformed number `{s}`")))?;
            col += i - start;
            out.push(Token {
                tok: Tok::Number(v),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(syntax(tl, tc, "unterminated string".into()));
            }
            let s: String = chars[start..i].iter().collect();
            i += 1;
            col += s.chars().count() + 2;
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            col += 2;
            out.push(Token {
                tok: Tok::Arrow,
                line: tl,
                column: tc,
            });
            continue;
        }
        if "[](),;+-*/^{}".contains(c) {
            i += 1;
            col += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(syntax(tl, tc, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

#[derive(Debug)]
struct Register {
    name: String,
    offset: usize,
    size: usize,
}

/// A register argument: either one element or a whole register.
#[derive(Debug, Clone)]
enum Arg {
    Single(usize),
    Whole(Vec<usize>),
}

impl Arg {
    fn len(&self) -> Option<usize> {
        match self {
            Arg::Single(_) => None,
            Arg::Whole(v) => Some(v.len()),
        }
    }
    fn at(&self, i: usize) -> usize {
        match self {
            Arg::Single(q) => *q,
            Arg::Whole(v) => v[i],
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    sign_reg: Option<usize>,
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Instruction>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, tok: &Token, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.err_at(&t, format!("expected `{c}`, found {}", describe(&t.tok))))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => Err(self.err_at(
                &t,
                format!("expected identifier, found {}", describe(other)),
            )),
        }
    }

    fn expect_uint(&mut self) -> Result<usize> {
        let t = self.next();
        match t.tok {
            Tok::Number(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            ref other => {
                Err(self.err_at(&t, format!("expected integer, found {}", describe(other))))
            }
        }
    }

    fn parse_program(&mut self) -> Result<()> {
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => return Ok(()),
                Tok::Ident(word) => {
                    let word = word.clone();
                    self.next();
                    self.statement(&word, &t)?;
                }
                other => return Err(self.err_at(&t, format!("unexpected {}", describe(other)))),
            }
        }
    }

    fn statement(&mut self, word: &str, at: &Token) -> Result<()> {
        match word {
            "OPENQASM" => {
                let t = self.next();
                match t.tok {
                    Tok::Number(v) if (v - 2.0).abs() < 1e-9 => {}
                    _ => return Err(self.err_at(&t, "only OPENQASM 2.0 is supported")),
                }
                self.expect_sym(';')
            }
            "include" => {
                let t = self.next();
                match &t.tok {
                    Tok::Str(s) if s == "qelib1.inc" => {}
                    _ => return Err(self.err_at(at, "include statements are not supported")),
                }
                self.expect_sym(';')
            }
            "qreg" | "creg" => {
                let (name, nt) = self.expect_ident()?;
                self.expect_sym('[')?;
                let size = self.expect_uint()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                if self.qregs.iter().chain(&self.cregs).any(|r| r.name == name) {
                    return Err(self.err_at(&nt, format!("register `{name}` redeclared")));
                }
                if word == "qreg" {
                    self.qregs.push(Register {
                        name,
                        offset: self.num_qubits,
                        size,
                    });
                    self.num_qubits += size;
                } else if name == SIGN_REGISTER {
                    self.sign_reg = Some(self.cregs.len());
                    self.cregs.push(Register {
                        name,
                        offset: usize::MAX,
                        size,
                    });
                } else {
                    self.cregs.push(Register {
                        name,
                        offset: self.num_clbits,
                        size,
                    });
                    self.num_clbits += size;
                }
                Ok(())
            }
            "gate" | "opaque" => Err(self.err_at(at, "custom gate definitions are not supported")),
            "if" => Err(self.err_at(at, "classical control flow is not supported")),
            "measure" => {
                let q = self.qarg()?;
                let arrow = self.next();
                if arrow.tok != Tok::Arrow {
                    return Err(self.err_at(&arrow, "expected `->`"));
                }
                let (c, signed) = self.carg()?;
                self.expect_sym(';')?;
                let n = match (q.len(), c.len()) {
                    (None, None) => 1,
                    (Some(a), Some(b)) if a == b => a,
                    _ => return Err(self.err_at(at, "measure argument sizes differ")),
                };
                for i in 0..n {
                    let inst = if signed {
                        Instruction::signed_measure(q.at(i))
                    } else {
                        Instruction::measure(q.at(i), c.at(i))
                    };
                    self.instructions.push(inst);
                }
                Ok(())
            }
            "reset" => {
                let q = self.qarg()?;
                self.expect_sym(';')?;
                for i in 0..q.len().unwrap_or(1) {
                    self.instructions.push(Instruction::reset(q.at(i)));
                }
                Ok(())
            }
            "barrier" => {
                let args = self.qarg_list()?;
                self.expect_sym(';')?;
                let mut qubits = Vec::new();
                for a in &args {
                    for i in 0..a.len().unwrap_or(1) {
                        qubits.push(a.at(i));
                    }
                }
                self.instructions.push(Instruction::barrier(&qubits));
                Ok(())
            }
            name => {
                let Some(kind) = GateKind::from_name(name).filter(|k| k.is_unitary()) else {
                    return Err(Error::UnsupportedGate(name.to_string()));
                };
                let mut params = Vec::new();
                if self.peek().tok == Tok::Sym('(') {
                    self.next();
                    if self.peek().tok != Tok::Sym(')') {
                        loop {
                            params.push(self.expr()?);
                            if self.peek().tok == Tok::Sym(',') {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_sym(')')?;
                }
                let want = usize::from(kind.is_parameterized());
                if params.len() != want {
                    return Err(self.err_at(
                        at,
                        format!("`{name}` takes {want} parameter(s), got {}", params.len()),
                    ));
                }
                let args = self.qarg_list()?;
                self.expect_sym(';')?;
                let arity = if kind.is_two_qubit() { 2 } else { 1 };
                if args.len() != arity {
                    return Err(self.err_at(
                        at,
                        format!(
                            "`{name}` takes {arity} qubit argument(s), got {}",
                            args.len()
                        ),
                    ));
                }
                let mut n: Option<usize> = None;
                for a in &args {
                    if let Some(l) = a.len() {
                        if n.is_some_and(|m| m != l) {
                            return Err(self.err_at(at, "register argument sizes differ"));
                        }
                        n = Some(l);
                    }
                }
                for i in 0..n.unwrap_or(1) {
                    let qubits: Vec<usize> = args.iter().map(|a| a.at(i)).collect();
                    if arity == 2 && qubits[0] == qubits[1] {
                        return Err(self.err_at(at, format!("`{name}` needs two distinct qubits")));
                    }
                    self.instructions.push(Instruction {
                        kind,
                        qubits,
                        angle: params.first().copied(),
                        clbit: None,
                    });
                }
                Ok(())
            }
        }
    }

    fn qarg_list(&mut self) -> Result<Vec<Arg>> {
        let mut args = vec![self.qarg()?];
        while self.peek().tok == Tok::Sym(',') {
            self.next();
            args.push(self.qarg()?);
        }
        Ok(args)
    }

    fn reg_arg(&mut self, quantum: bool) -> Result<(Arg, bool)> {
        let (name, nt) = self.expect_ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let Some(ri) = regs.iter().position(|r| r.name == name) else {
            return Err(self.err_at(&nt, format!("unknown register `{name}`")));
        };
        let signed = !quantum && Some(ri) == self.sign_reg;
        let (offset, size) = (regs[ri].offset, regs[ri].size);
        if self.peek().tok == Tok::Sym('[') {
            self.next();
            let it = self.peek().clone();
            let idx = self.expect_uint()?;
            self.expect_sym(']')?;
            if idx >= size {
                if quantum {
                    return Err(Error::QubitOutOfRange { index: idx, size });
                }
                return Err(self.err_at(&it, format!("index {idx} out of range for `{name}`")));
            }
            Ok((Arg::Single(if signed { 0 } else { offset + idx }), signed))
        } else {
            let all = if signed {
                vec![0; size]
            } else {
                (offset..offset + size).collect()
            };
            Ok((Arg::Whole(all), signed))
        }
    }

    fn qarg(&mut self) -> Result<Arg> {
        Ok(self.reg_arg(true)?.0)
    }

    fn carg(&mut self) -> Result<(Arg, bool)> {
        self.reg_arg(false)
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Sym('+') => {
                    self.next();
                    v += self.term()?;
                }
                Tok::Sym('-') => {
                    self.next();
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Sym('*') => {
                    self.next();
                    v *= self.unary()?;
                }
                Tok::Sym('/') => {
                    self.next();
                    v /= self.unary()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        match self.peek().tok {
            Tok::Sym('-') => {
                self.next();
                Ok(-self.unary()?)
            }
            Tok::Sym('+') => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<f64> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Sym('^') {
            self.next();
            let e = self.unary()?;
            return Ok(base.powf(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        let t = self.next();
        match &t.tok {
            Tok::Number(v) => Ok(*v),
            Tok::Ident(s) if s == "pi" => Ok(PI),
            Tok::Ident(f)
                if matches!(f.as_str(), "sin" | "cos" | "tan" | "exp" | "ln" | "sqrt") =>
            {
                self.expect_sym('(')?;
                let x = self.expr()?;
                self.expect_sym(')')?;
                Ok(match f.as_str() {
                    "sin" => x.sin(),
                    "cos" => x.cos(),
                    "tan" => x.tan(),
                    "exp" => x.exp(),
                    "ln" => x.ln(),
                    _ => x.sqrt(),
                })
            }
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            other => Err(self.err_at(
                &t,
                format!("expected expression, found {}", describe(other)),
            )),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(v) => format!("number {v}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Arrow => "`->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parse OpenQASM 2 text into a [`Circuit`], keeping program order.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        qregs: Vec::new(),
        cregs: Vec::new(),
        sign_reg: None,
        num_qubits: 0,
        num_clbits: 0,
        instructions: Vec::new(),
    };
    p.parse_program()?;
    let circuit = Circuit {
        name: "circuit".into(),
        num_qubits: p.num_qubits,
        num_clbits: p.num_clbits,
        instructions: p.instructions,
    };
    circuit.validate()?;
    Ok(circuit)
}

/// Render an angle so that [`parse_qasm`] reads back the identical `f64`.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    for d in [1i64, 2, 3, 4, 6, 8, 12, 16] {
        let k = (x * d as f64 / PI).round() as i64;
        if k == 0 || k.abs() > 64 || gcd(k.unsigned_abs(), d as u64) != 1 {
            continue;
        }
        // Same evaluation order as the parser: (k*pi)/d, with unary minus on k.
        let num = if k.abs() == 1 {
            PI
        } else {
            k.abs() as f64 * PI
        };
        let mut v = if d == 1 { num } else { num / d as f64 };
        if k < 0 {
            v = -v;
        }
        if v.to_bits() == x.to_bits() {
            let sign = if k < 0 { "-" } else { "" };
            let coeff = if k.abs() == 1 {
                String::new()
            } else {
                format!("{}*", k.abs())
            };
            let den = if d == 1 {
                String::new()
            } else {
                format!("/{d}")
            };
            return format!("{sign}{coeff}pi{den}");
        }
    }
    format!("{x}")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Emit a circuit as OpenQASM 2 text, one statement per line.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut s = String::new();
    s.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.num_qubits);
    if c.num_clbits > 0 {
        let _ = writeln!(s, "creg c[{}];", c.num_clbits);
    }
    if c.instructions.iter().any(Instruction::is_signed_measure) {
        let _ = writeln!(s, "creg {SIGN_REGISTER}[1];");
    }
    for inst in &c.instructions {
        let qs: Vec<String> = inst.qubits.iter().map(|q| format!("q[{q}]")).collect();
        match inst.kind {
            GateKind::Measure => match inst.clbit {
                Some(cb) => {
                    let _ = writeln!(s, "measure {} -> c[{cb}];", qs[0]);
                }
                None => {
                    let _ = writeln!(s, "measure {} -> {SIGN_REGISTER}[0];", qs[0]);
                }
            },
            _ => {
                let _ = match inst.angle {
                    Some(a) => writeln!(s, "{}({}) {};", inst.kind, format_angle(a), qs.join(",")),
                    None => writeln!(s, "{} {};", inst.kind, qs.join(",")),
                };
            }
        }
    }
    s
}
