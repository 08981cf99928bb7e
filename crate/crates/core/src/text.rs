//! Tiny cursor shared by the element, modulus and class-spec parsers.

use crate::error::{Error, Result};

pub(crate) struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    /// Column of `src[0]` within the caller's full input (1-based).
    base_column: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str, base_column: usize) -> Self {
        Cursor {
            src: src.as_bytes(),
            pos: 0,
            base_column,
        }
    }

    pub(crate) fn column(&self) -> usize {
        self.base_column + self.pos
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.column(), message)
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub(crate) fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn expect_end(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    pub(crate) fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(self.base_column + start, "integer out of range"))
    }

    /// Consumes a balanced `( ... )` group and returns its inner text with the
    /// column where it starts.
    pub(crate) fn parenthesized(&mut self) -> Result<(&'a str, usize)> {
        self.expect(b'(')?;
        let start = self.pos;
        let mut depth = 1;
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        let inner = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                        self.pos += 1;
                        return Ok((inner, self.base_column + start));
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
        Err(self.error("unbalanced parenthesis"))
    }
}
