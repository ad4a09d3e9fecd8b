use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Number { value: f64, integral: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    /// Character offset into the source.
    pub pos: usize,
}

pub(crate) fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => TokenKind::Plus,
            // ASCII hyphen and U+2212 MINUS SIGN
            '-' | '\u{2212}' => TokenKind::Minus,
            '*' | '\u{00B7}' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                let (value, integral, end) = lex_number(&chars, i)?;
                tokens.push(Token {
                    kind: TokenKind::Number { value, integral },
                    pos: start,
                });
                i = end;
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut end = i;
                while end < chars.len() && (chars[end].is_alphanumeric() || chars[end] == '_') {
                    end += 1;
                }
                let name: String = chars[i..end].iter().collect();
                tokens.push(Token {
                    kind: TokenKind::Ident(name),
                    pos: start,
                });
                i = end;
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        tokens.push(Token { kind, pos: start });
        i += 1;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        pos: chars.len(),
    });
    Ok(tokens)
}

fn lex_number(chars: &[char], start: usize) -> Result<(f64, bool, usize), ParseError> {
    let mut end = start;
    let mut integral = true;
    while end < chars.len() && chars[end].is_ascii_digit() {
        end += 1;
    }
    if end < chars.len() && chars[end] == '.' {
        integral = false;
        end += 1;
        while end < chars.len() && chars[end].is_ascii_digit() {
            end += 1;
        }
    }
    if end < chars.len() && (chars[end] == 'e' || chars[end] == 'E') {
        let mut probe = end + 1;
        if probe < chars.len() && (chars[probe] == '+' || chars[probe] == '-') {
            probe += 1;
        }
        if probe < chars.len() && chars[probe].is_ascii_digit() {
            integral = false;
            end = probe;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
        }
    }
    let text: String = chars[start..end].iter().collect();
    let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
        pos: start,
        message: format!("malformed number '{text}'"),
    })?;
    if !value.is_finite() {
        return Err(ParseError::Syntax {
            pos: start,
            message: format!("number '{text}' is not finite"),
        });
    }
    Ok((value, integral, end))
}
