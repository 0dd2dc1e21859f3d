//! Finite groups given by multiplication tables.

use crate::arith::nt;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    orders: Vec<u64>,
}

impl GroupTable {
    /// Checks closure, identity, inverses and associativity exhaustively.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidParams("empty group".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidParams("multiplication table is not n×n over 0..n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidParams("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidParams(format!("element {g} has no inverse")))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidParams(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let orders = (0..n)
            .map(|g| {
                let mut k = 1;
                let mut x = g;
                while x != identity {
                    x = table[x][g];
                    k += 1;
                }
                k
            })
            .collect();
        Ok(GroupTable { table, identity, inverses, orders })
    }

    /// Z/n with element k the k-th power of the generator 1.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(table).expect("cyclic group table")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn element_order(&self, g: usize) -> u64 {
        self.orders[g]
    }

    pub fn is_p_regular(&self, g: usize, p: u64) -> bool {
        self.orders[g] % p != 0
    }

    /// h g h⁻¹
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(h, g), self.inverse(h))
    }

    /// lcm of the prime-to-p parts of all element orders.
    pub fn prime_to_p_exponent(&self, p: u64) -> u64 {
        self.orders.iter().fold(1, |acc, &o| nt::lcm(acc, nt::prime_to_p_part(o, p)))
    }
}
