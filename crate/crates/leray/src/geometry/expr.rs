//! A tiny arithmetic language for graph surfaces `Im z_n = F(z', Re z_n)`.
//!
//! Grammar: `+ - * / ^`, parentheses, numeric literals, `i`, `pi`,
//! variables `z1 … z9` and `u`, and the functions `abs2 re im conj abs sqrt
//! exp log sin cos`. Values are carried as (real part, imaginary part) pairs
//! of a generic scalar so that the same tree evaluates on complexified real
//! coordinates.

use super::Scalar;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    I,
    Var(usize),
    U,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Abs2,
    Re,
    Im,
    Conj,
    Abs,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

/// A parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
    max_var: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let v = lit
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number literal `{lit}`")))?;
            out.push(Tok::Num(v));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else if ch == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(Error::Config(format!("unexpected character `{ch}` in expression")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    max_var: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Node::Bin('+', Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Node::Bin('-', Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Node::Bin('*', Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Node::Bin('/', Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat_op('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let exp = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| Error::Config("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return Err(Error::Config("missing `)`".into()));
                }
                Ok(e)
            }
            Tok::Op(o) => Err(Error::Config(format!("unexpected `{o}`"))),
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "abs2" => Some(Func::Abs2),
                    "re" => Some(Func::Re),
                    "im" => Some(Func::Im),
                    "conj" => Some(Func::Conj),
                    "abs" => Some(Func::Abs),
                    "sqrt" => Some(Func::Sqrt),
                    "exp" => Some(Func::Exp),
                    "log" => Some(Func::Log),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    _ => None,
                };
                if let Some(f) = func {
                    if !self.eat_op('(') {
                        return Err(Error::Config(format!("`{name}` needs an argument")));
                    }
                    let arg = self.expr()?;
                    if !self.eat_op(')') {
                        return Err(Error::Config("missing `)`".into()));
                    }
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "i" => Ok(Node::I),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "u" => Ok(Node::U),
                    _ => {
                        let idx = name
                            .strip_prefix('z')
                            .and_then(|d| d.parse::<usize>().ok())
                            .filter(|&k| k >= 1)
                            .ok_or_else(|| Error::Config(format!("unknown identifier `{name}`")))?;
                        self.max_var = self.max_var.max(idx);
                        Ok(Node::Var(idx - 1))
                    }
                }
            }
        }
    }
}

/// A complex value as a pair of scalars.
#[derive(Clone, Copy, Debug)]
struct Pair<T> {
    re: T,
    im: T,
}

fn constant(node: &Node) -> Option<f64> {
    match node {
        Node::Num(v) => Some(*v),
        Node::Neg(a) => constant(a).map(|v| -v),
        Node::Bin(op, a, b) => {
            let (x, y) = (constant(a)?, constant(b)?);
            Some(match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                '/' => x / y,
                '^' => x.powf(y),
                _ => return None,
            })
        }
        _ => None,
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let toks = tokenize(source)?;
        if toks.is_empty() {
            return Err(Error::Config("empty expression".into()));
        }
        let mut p = Parser { toks, pos: 0, max_var: 0 };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Config(format!("trailing input in `{source}`")));
        }
        Ok(Self { root, source: source.to_string(), max_var: p.max_var })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Largest index `k` of a variable `zk` used.
    pub fn max_variable(&self) -> usize {
        self.max_var
    }

    /// Evaluates the real part of the expression. `z` holds interleaved
    /// (re, im) coordinates of `z'`, `u` is `Re z_n`.
    pub fn eval_real<T: Scalar>(&self, z: &[T], u: T) -> Result<T> {
        Ok(self.eval_pair(&self.root, z, u)?.re)
    }

    /// Evaluates the expression as a complex number (real scalars only).
    pub fn eval_complex(&self, z: &[f64], u: f64) -> Result<(f64, f64)> {
        let p = self.eval_pair(&self.root, z, u)?;
        Ok((p.re, p.im))
    }

    fn eval_pair<T: Scalar>(&self, node: &Node, z: &[T], u: T) -> Result<Pair<T>> {
        let zero = T::cst(0.0);
        let mul = |a: Pair<T>, b: Pair<T>| Pair { re: a.re * b.re - a.im * b.im, im: a.re * b.im + a.im * b.re };
        let div = |a: Pair<T>, b: Pair<T>| {
            let d = b.re * b.re + b.im * b.im;
            Pair { re: (a.re * b.re + a.im * b.im) / d, im: (a.im * b.re - a.re * b.im) / d }
        };
        Ok(match node {
            Node::Num(v) => Pair { re: T::cst(*v), im: zero },
            Node::I => Pair { re: zero, im: T::cst(1.0) },
            Node::U => Pair { re: u, im: zero },
            Node::Var(k) => {
                if 2 * k + 1 >= z.len() {
                    return Err(Error::Config(format!("variable z{} out of range", k + 1)));
                }
                Pair { re: z[2 * k], im: z[2 * k + 1] }
            }
            Node::Neg(a) => {
                let v = self.eval_pair(a, z, u)?;
                Pair { re: -v.re, im: -v.im }
            }
            Node::Bin(op, a, b) => {
                let x = self.eval_pair(a, z, u)?;
                if *op == '^' {
                    let p = constant(b)
                        .ok_or_else(|| Error::Config("exponents must be constant".into()))?;
                    return power(x, p, mul, div);
                }
                let y = self.eval_pair(b, z, u)?;
                match op {
                    '+' => Pair { re: x.re + y.re, im: x.im + y.im },
                    '-' => Pair { re: x.re - y.re, im: x.im - y.im },
                    '*' => mul(x, y),
                    '/' => div(x, y),
                    _ => unreachable!(),
                }
            }
            Node::Call(f, a) => {
                let v = self.eval_pair(a, z, u)?;
                match f {
                    Func::Abs2 => Pair { re: v.re * v.re + v.im * v.im, im: zero },
                    Func::Re => Pair { re: v.re, im: zero },
                    Func::Im => Pair { re: v.im, im: zero },
                    Func::Conj => Pair { re: v.re, im: -v.im },
                    Func::Abs => Pair { re: (v.re * v.re + v.im * v.im).sqrt(), im: zero },
                    _ => {
                        require_real(&v)?;
                        let r = match f {
                            Func::Sqrt => v.re.sqrt(),
                            Func::Exp => v.re.exp(),
                            Func::Log => v.re.ln(),
                            Func::Sin => v.re.sin(),
                            Func::Cos => v.re.cos(),
                            _ => unreachable!(),
                        };
                        Pair { re: r, im: zero }
                    }
                }
            }
        })
    }
}

fn require_real<T: Scalar>(v: &Pair<T>) -> Result<()> {
    if v.im.magnitude() > 1e-12 * (1.0 + v.re.magnitude()) {
        return Err(Error::Config(
            "non-integer powers and transcendental functions need real arguments".into(),
        ));
    }
    Ok(())
}

fn power<T: Scalar>(
    x: Pair<T>,
    p: f64,
    mul: impl Fn(Pair<T>, Pair<T>) -> Pair<T>,
    div: impl Fn(Pair<T>, Pair<T>) -> Pair<T>,
) -> Result<Pair<T>> {
    let zero = T::cst(0.0);
    let one = Pair { re: T::cst(1.0), im: zero };
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        let k = p.abs() as u32;
        let mut acc = one;
        for _ in 0..k {
            acc = mul(acc, x);
        }
        return Ok(if p < 0.0 { div(one, acc) } else { acc });
    }
    require_real(&x)?;
    Ok(Pair { re: x.re.powf(p), im: zero })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_polynomials() {
        let e = Expr::parse("abs2(z1) + re(z1^2)/2 + 3*u").unwrap();
        // z1 = 1 + 2i, u = 0.5 → 5 + (−3)/2 + 1.5
        let v = e.eval_real(&[1.0, 2.0], 0.5).unwrap();
        assert!((v - 5.0).abs() < 1e-14);
    }

    #[test]
    fn fractional_powers_need_real_base() {
        let ok = Expr::parse("abs2(z1)^1.5").unwrap();
        assert!((ok.eval_real(&[0.0, 2.0], 0.0).unwrap() - 8.0).abs() < 1e-12);
        let bad = Expr::parse("z1^1.5").unwrap();
        assert!(bad.eval_real(&[1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("z1 +").is_err());
        assert!(Expr::parse("foo(z1)").is_err());
        assert!(Expr::parse("(z1").is_err());
        assert!(Expr::parse("z0").is_err());
        assert!(Expr::parse("z1 ^ u").unwrap().eval_real(&[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = Expr::parse("-2^2 + 2*3 - 4/2").unwrap();
        assert_eq!(e.eval_real::<f64>(&[], 0.0).unwrap(), -4.0 + 6.0 - 2.0);
        let (re, im) = Expr::parse("conj(i*z1)").unwrap().eval_complex(&[1.0, 0.0], 0.0).unwrap();
        assert_eq!((re, im), (0.0, -1.0));
    }
}
