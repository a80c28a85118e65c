//! Minimal arithmetic expression grammar for user-supplied maps:
//! +, -, *, /, ^, sqrt, sin, cos, exp, variables x1..xn, parentheses.
//! Expressions evaluate on second-order jets, so gradients and Hessians of
//! user maps are analytic rather than finite-differenced.

use gbk_core::numeric::Jet2;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Var(usize),
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

fn tokenize(input: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || ((chars[i] == 'e' || chars[i] == 'E')
                            && i + 1 < chars.len()
                            && (chars[i + 1].is_ascii_digit()
                                || chars[i + 1] == '+'
                                || chars[i + 1] == '-'))
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| format!("bad number literal {text:?}"))?;
                tokens.push(Token::Num(v));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "sqrt" => tokens.push(Token::Func(Func::Sqrt)),
                    "sin" => tokens.push(Token::Func(Func::Sin)),
                    "cos" => tokens.push(Token::Func(Func::Cos)),
                    "exp" => tokens.push(Token::Func(Func::Exp)),
                    _ => {
                        if let Some(idx) = word.strip_prefix('x').and_then(|s| s.parse::<usize>().ok())
                        {
                            if idx == 0 {
                                return Err("variables are numbered from x1".into());
                            }
                            tokens.push(Token::Var(idx - 1));
                        } else {
                            return Err(format!("unknown identifier {word:?}"));
                        }
                    }
                }
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<(), String> {
        match self.next() {
            Some(found) if found == t => Ok(()),
            found => Err(format!("expected {t:?}, found {found:?}")),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, String> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.next();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*' | '/') factor)*
    fn term(&mut self) -> Result<Expr, String> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next();
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.next();
                    acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := unary ('^' factor)?   (right associative)
    fn factor(&mut self) -> Result<Expr, String> {
        let base = self.unary()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.next();
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, String> {
        match self.peek() {
            Some(Token::Minus) => {
                self.next();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Plus) => {
                self.next();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, String> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Var(i)) => Ok(Expr::Var(i)),
            Some(Token::Func(f)) => {
                self.expect(Token::LParen)?;
                let arg = self.expr()?;
                self.expect(Token::RParen)?;
                let arg = Box::new(arg);
                Ok(match f {
                    Func::Sqrt => Expr::Sqrt(arg),
                    Func::Sin => Expr::Sin(arg),
                    Func::Cos => Expr::Cos(arg),
                    Func::Exp => Expr::Exp(arg),
                })
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            found => Err(format!("unexpected token {found:?}")),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, String> {
    let tokens = tokenize(input)?;
    let mut parser = Parser { tokens, pos: 0 };
    let e = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(format!(
            "trailing input after expression: {:?}",
            &parser.tokens[parser.pos..]
        ));
    }
    Ok(e)
}

impl Expr {
    /// Largest variable index used, as a count (x3 -> 3).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Sqrt(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                a.max_var()
            }
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn eval(&self, x: &[Jet2]) -> Jet2 {
        match self {
            Expr::Num(v) => Jet2::constant(*v, x[0].g.len()),
            Expr::Var(i) => x[*i].clone(),
            Expr::Neg(a) => a.eval(x).neg(),
            Expr::Add(a, b) => a.eval(x).add(&b.eval(x)),
            Expr::Sub(a, b) => a.eval(x).sub(&b.eval(x)),
            Expr::Mul(a, b) => a.eval(x).mul(&b.eval(x)),
            Expr::Div(a, b) => a.eval(x).div(&b.eval(x)),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match **b {
                    Expr::Num(p) if (p.fract() == 0.0) && p.abs() < 64.0 => base.powi(p as i32),
                    Expr::Num(p) => base.powf(p),
                    // general a^b = exp(b ln a)
                    _ => b.eval(x).mul(&base.ln()).exp(),
                }
            }
            Expr::Sqrt(a) => a.eval(x).sqrt(),
            Expr::Sin(a) => a.eval(x).sin(),
            Expr::Cos(a) => a.eval(x).cos(),
            Expr::Exp(a) => a.eval(x).exp(),
        }
    }
}

/// Parse a semicolon-separated list of component expressions.
pub fn parse_components(input: &str) -> Result<Vec<Expr>, String> {
    input
        .split(';')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_at(src: &str, x: &[f64]) -> f64 {
        parse(src).unwrap().eval(&Jet2::variables(x)).v
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval_at("1 + 2 * 3", &[0.0]), 7.0);
        assert_eq!(eval_at("(1 + 2) * 3", &[0.0]), 9.0);
        // Right-associativity; the nested exponent takes the exp(b ln a)
        // path, so compare with a tolerance.
        assert!((eval_at("2 ^ 3 ^ 2", &[0.0]) - 512.0).abs() < 1e-9);
        assert_eq!(eval_at("-x1 + 4", &[1.5]), 2.5);
        assert_eq!(eval_at("x1 / x2", &[1.0, 4.0]), 0.25);
    }

    #[test]
    fn functions_and_derivatives() {
        let e = parse("sqrt(x1^2 + x2^2) * sin(x2) + exp(cos(x1))").unwrap();
        assert_eq!(e.max_var(), 2);
        let x = [0.8, -0.3];
        let jet = e.eval(&Jet2::variables(&x));
        let f = |x: &[f64]| (x[0] * x[0] + x[1] * x[1]).sqrt() * x[1].sin() + x[0].cos().exp();
        assert!((jet.v - f(&x)).abs() < 1e-14);
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            assert!((jet.g[i] - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn errors_reported() {
        assert!(parse("x0 + 1").is_err());
        assert!(parse("tan(x1)").is_err());
        assert!(parse("1 + ").is_err());
        assert!(parse("(x1").is_err());
        assert!(parse("x1 x2").is_err());
    }

    #[test]
    fn component_lists() {
        let parts = parse_components("x1^2 - x2^2; 2*x1*x2").unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[1].max_var(), 2);
    }
}
