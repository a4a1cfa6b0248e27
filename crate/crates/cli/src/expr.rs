//! Set expressions for ultimately periodic subsets of the naturals.
//!
//! ```text
//! expr  := unary (("|" | "&" | "-") unary)*     left to right
//! unary := "~" unary | "(" expr ")" | base
//! base  := "N" | "empty" | "evens" | "odds" | "{" [num ("," num)*] "}"
//!        | num "mod" num | "tail" num
//! ```
//!
//! `3 mod 4` is `{n : n ≡ 3 mod 4}` and `tail 5` is `{5, 6, 7, …}`.

use scaled_boolean::nonarch::UPSet;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Num(u64),
    Word(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
            }
            out.push(Token::Num(
                s.parse().map_err(|_| format!("number {s} is too large"))?,
            ));
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric()) {
                s.push(d);
                chars.next();
            }
            out.push(Token::Word(s));
        } else if "|&-~(){},".contains(c) {
            out.push(Token::Sym(c));
            chars.next();
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

/// Largest modulus accepted, to keep normal forms small.
const MAX_MODULUS: u64 = 1 << 12;

/// Largest explicit point or tail start.
const MAX_POINT: u64 = 1 << 16;

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
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(Token::Sym(s)) if s == c => Ok(()),
            other => Err(format!(
                "expected {c:?}, found {}",
                describe(other.as_ref())
            )),
        }
    }

    fn number(&mut self, limit: u64) -> Result<u64, String> {
        match self.next() {
            Some(Token::Num(n)) if n <= limit => Ok(n),
            Some(Token::Num(n)) => Err(format!("{n} exceeds the limit {limit}")),
            other => Err(format!(
                "expected a number, found {}",
                describe(other.as_ref())
            )),
        }
    }

    fn expr(&mut self) -> Result<UPSet, String> {
        let mut acc = self.unary()?;
        while let Some(Token::Sym(op @ ('|' | '&' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = match op {
                '|' => acc.union(&rhs),
                '&' => acc.intersection(&rhs),
                _ => acc.difference(&rhs),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<UPSet, String> {
        match self.peek() {
            Some(Token::Sym('~')) => {
                self.pos += 1;
                Ok(self.unary()?.complement())
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            _ => self.base(),
        }
    }

    fn base(&mut self) -> Result<UPSet, String> {
        match self.next() {
            Some(Token::Word(w)) => match w.as_str() {
                "N" => Ok(UPSet::naturals()),
                "empty" => Ok(UPSet::empty()),
                "evens" => Ok(UPSet::evens()),
                "odds" => Ok(UPSet::odds()),
                "tail" => Ok(UPSet::tail(self.number(MAX_POINT)?)),
                _ => Err(format!("unknown set {w:?}")),
            },
            Some(Token::Sym('{')) => {
                let mut points = Vec::new();
                if self.peek() != Some(&Token::Sym('}')) {
                    points.push(self.number(MAX_POINT)?);
                    while self.peek() == Some(&Token::Sym(',')) {
                        self.pos += 1;
                        points.push(self.number(MAX_POINT)?);
                    }
                }
                self.expect_sym('}')?;
                Ok(UPSet::finite(points))
            }
            Some(Token::Num(r)) => {
                match self.next() {
                    Some(Token::Word(w)) if w == "mod" => {}
                    other => {
                        return Err(format!(
                            "expected \"mod\", found {}",
                            describe(other.as_ref())
                        ))
                    }
                }
                let m = self.number(MAX_MODULUS)?;
                if m == 0 {
                    return Err("modulus must be positive".to_string());
                }
                if r >= m {
                    return Err(format!("residue {r} must be below the modulus {m}"));
                }
                Ok(UPSet::residue_class(r, m))
            }
            other => Err(format!(
                "expected a set, found {}",
                describe(other.as_ref())
            )),
        }
    }
}

fn describe(t: Option<&Token>) -> String {
    match t {
        None => "end of input".to_string(),
        Some(Token::Num(n)) => n.to_string(),
        Some(Token::Word(w)) => format!("{w:?}"),
        Some(Token::Sym(c)) => format!("{c:?}"),
    }
}

pub fn parse_upset(text: &str) -> Result<UPSet, String> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let set = p.expr()?;
    match p.peek() {
        None => Ok(set),
        Some(t) => Err(format!(
            "unexpected {} after the expression",
            describe(Some(t))
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        assert_eq!(parse_upset("evens").unwrap(), UPSet::evens());
        assert_eq!(parse_upset("~evens").unwrap(), UPSet::odds());
        assert_eq!(parse_upset("0 mod 2 | 1 mod 2").unwrap(), UPSet::naturals());
        assert_eq!(
            parse_upset("evens | {1}").unwrap(),
            UPSet::evens().with_point(1)
        );
        assert_eq!(parse_upset("N - tail 3").unwrap(), UPSet::finite([0, 1, 2]));
        assert_eq!(
            parse_upset("(evens & 0 mod 3) - {0}").unwrap(),
            UPSet::residue_class(0, 6).without_point(0)
        );
        assert_eq!(parse_upset("{}").unwrap(), UPSet::empty());
        assert!(parse_upset("3 mod 2").is_err());
        assert!(parse_upset("evens |").is_err());
        assert!(parse_upset("evens odds").is_err());
    }
}
