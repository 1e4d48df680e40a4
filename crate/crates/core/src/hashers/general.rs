use super::window::Window;
use super::{check_ngram_len, HashFamily, NgramHasher};
use crate::error::{Error, Result};
use crate::gf2::FieldModulus;
use crate::symbols::{Symbol, SymbolMap, SymbolTable};
use crate::word::HashWord;

/// Recursive hashing by general polynomials: arithmetic in GF(2)[x]/p(x)
/// with p irreducible of degree L. Pairwise independent.
#[derive(Debug, Clone)]
pub struct GeneralHasher<W> {
    n: usize,
    modulus: FieldModulus<W>,
    table: SymbolTable<W>,
    /// h(s)·xⁿ mod p, computed once per distinct symbol.
    shifted: SymbolMap<W>,
    window: Window<Symbol>,
    /// Shifted contributions of the symbols in the window.
    outgoing: Window<W>,
    current: Option<W>,
}

impl<W: HashWord> GeneralHasher<W> {
    pub fn new(n: usize, modulus: FieldModulus<W>, table: SymbolTable<W>) -> Result<Self> {
        let width = modulus.width();
        if table.width() != width {
            return Err(Error::Config(format!(
                "table width {} differs from polynomial degree {width}",
                table.width()
            )));
        }
        if n == 0 || n > width as usize {
            return Err(Error::Config(format!(
                "general hashing needs 1 ≤ n ≤ L (n = {n}, L = {width})"
            )));
        }
        Ok(Self {
            n,
            modulus,
            table,
            shifted: SymbolMap::new(),
            window: Window::new(n),
            outgoing: Window::new(n),
            current: None,
        })
    }

    pub fn modulus(&self) -> &FieldModulus<W> {
        &self.modulus
    }

    pub fn table_mut(&mut self) -> &mut SymbolTable<W> {
        &mut self.table
    }
}

impl<W: HashWord> NgramHasher<W> for GeneralHasher<W> {
    fn family(&self) -> HashFamily {
        HashFamily::General
    }

    fn n(&self) -> usize {
        self.n
    }

    fn width(&self) -> u32 {
        self.modulus.width()
    }

    fn hash_full(&mut self, ngram: &[Symbol]) -> Result<W> {
        check_ngram_len(self.n, ngram)?;
        let mut acc = W::zero();
        for &s in ngram {
            acc = self.modulus.mul_x(acc) ^ self.table.lookup(s);
        }
        Ok(acc)
    }

    #[inline]
    fn push(&mut self, symbol: Symbol) -> Option<W> {
        let v = self.table.lookup(symbol);
        let (modulus, n) = (&self.modulus, self.n);
        let vx = self
            .shifted
            .get_or_insert_with(symbol, || modulus.mul_x_pow(v, n));
        self.window.push(symbol);
        let out = self.outgoing.push(vx);
        let h = match (out, self.current) {
            (Some(out), Some(h)) => self.modulus.mul_x(h) ^ out ^ v,
            _ if self.window.is_full() => {
                let mut acc = W::zero();
                for i in 0..self.n {
                    let s = self.window.as_slice()[i];
                    acc = self.modulus.mul_x(acc) ^ self.table.lookup(s);
                }
                acc
            }
            _ => return None,
        };
        self.current = Some(h);
        Some(h)
    }

    fn current(&self) -> Option<W> {
        self.current
    }

    fn window(&self) -> &[Symbol] {
        self.window.as_slice()
    }

    fn reset(&mut self) {
        self.window.clear();
        self.outgoing.clear();
        self.current = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{self, POLY_DEGREE_19, POLY_DEGREE_8};

    #[test]
    fn hash_is_polynomial_in_x() {
        let m = FieldModulus::<u64>::new(POLY_DEGREE_19).unwrap();
        let mut h = GeneralHasher::new(3, m, SymbolTable::new(4, 19).unwrap()).unwrap();
        let (a, b, c) = (1, 2, 3);
        let ha = h.table_mut().lookup(a) as u128;
        let hb = h.table_mut().lookup(b) as u128;
        let hc = h.table_mut().lookup(c) as u128;
        let expected = gf2::rem((ha << 2) ^ (hb << 1) ^ hc, POLY_DEGREE_19);
        assert_eq!(h.hash_full(&[a, b, c]).unwrap() as u128, expected);
    }

    #[test]
    fn residues_stay_below_degree() {
        let m = FieldModulus::<u32>::new(POLY_DEGREE_8).unwrap();
        let mut h = GeneralHasher::new(5, m, SymbolTable::new(4, 8).unwrap()).unwrap();
        for s in 0..1000u32 {
            if let Some(v) = h.push(s % 37) {
                assert!(v < 256);
            }
        }
    }

    #[test]
    fn width_mismatch_rejected() {
        let m = FieldModulus::<u64>::new(POLY_DEGREE_19).unwrap();
        assert!(GeneralHasher::new(3, m, SymbolTable::new(4, 18).unwrap()).is_err());
        assert!(GeneralHasher::new(20, m, SymbolTable::new(4, 19).unwrap()).is_err());
    }
}
