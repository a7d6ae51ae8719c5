//! The builtin catalog of small permutation groups.
//!
//! Degrees per family:
//!
//! | family | degree |
//! |---|---|
//! | `cyclic(n)` | `n` (a single `n`-cycle) |
//! | `dihedral(2n)` | `n` for `n ≥ 3`; the Klein four group on 4 points for `2n = 4` |
//! | `dicyclic(4n)` | `4n` (right regular representation) |
//! | `symmetric(n)`, `alternating(n)` | `n` |
//! | `elementary_abelian(p,k)` | `pk` (disjoint `p`-cycles) |
//! | `heisenberg(p)` | `p³` (unitriangular matrices acting on `F_p³`) |
//! | `frobenius21` | 7 |
//! | `psl2(q)` | `q + 1` (projective line) |
//! | `sl2(q)` | `q² − 1` (nonzero vectors of `F_q²`) |
//! | `direct_product(A,B)` | sum of the factor degrees |

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::group::{Caps, Group};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BuiltinSpec {
    Cyclic(usize),
    Dihedral(usize),
    Dicyclic(usize),
    Symmetric(usize),
    Alternating(usize),
    ElementaryAbelian(u64, u32),
    Heisenberg(u64),
    Frobenius21,
    Psl2(u64),
    Sl2(u64),
    DirectProduct(Box<BuiltinSpec>, Box<BuiltinSpec>),
}

impl fmt::Display for BuiltinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinSpec::Cyclic(n) => write!(f, "cyclic({n})"),
            BuiltinSpec::Dihedral(n) => write!(f, "dihedral({n})"),
            BuiltinSpec::Dicyclic(n) => write!(f, "dicyclic({n})"),
            BuiltinSpec::Symmetric(n) => write!(f, "symmetric({n})"),
            BuiltinSpec::Alternating(n) => write!(f, "alternating({n})"),
            BuiltinSpec::ElementaryAbelian(p, k) => write!(f, "elementary_abelian({p},{k})"),
            BuiltinSpec::Heisenberg(p) => write!(f, "heisenberg({p})"),
            BuiltinSpec::Frobenius21 => write!(f, "frobenius21"),
            BuiltinSpec::Psl2(q) => write!(f, "psl2({q})"),
            BuiltinSpec::Sl2(q) => write!(f, "sl2({q})"),
            BuiltinSpec::DirectProduct(a, b) => write!(f, "direct_product({a},{b})"),
        }
    }
}

fn perm(degree: usize, cycles: &[Vec<usize>]) -> Permutation {
    Permutation::from_cycles(degree, cycles).expect("catalog permutation is well formed")
}

fn images(v: Vec<usize>) -> Permutation {
    Permutation::from_images(v).expect("catalog permutation is well formed")
}

fn range_error(spec: &BuiltinSpec, why: &str) -> Error {
    Error::validation(format!("{spec}: {why}"))
}

impl BuiltinSpec {
    /// Checks parameters and returns `(degree, generators)`.
    pub fn generators(&self) -> Result<(usize, Vec<Permutation>)> {
        Ok(match *self {
            BuiltinSpec::Cyclic(n) => {
                if n == 0 {
                    return Err(range_error(self, "order must be positive"));
                }
                (n, vec![perm(n, &[(0..n).collect()])])
            }
            BuiltinSpec::Dihedral(m) => {
                if m < 2 || m % 2 != 0 {
                    return Err(range_error(self, "order must be even and at least 2"));
                }
                let n = m / 2;
                match n {
                    1 => (2, vec![perm(2, &[vec![0, 1]])]),
                    2 => (
                        4,
                        vec![perm(4, &[vec![0, 1], vec![2, 3]]), perm(4, &[vec![0, 2], vec![1, 3]])],
                    ),
                    _ => {
                        let rotation = perm(n, &[(0..n).collect()]);
                        let reflection = images((0..n).map(|i| (n - i) % n).collect());
                        (n, vec![rotation, reflection])
                    }
                }
            }
            BuiltinSpec::Dicyclic(m) => {
                if m < 8 || m % 4 != 0 {
                    return Err(range_error(self, "order must be a multiple of 4 and at least 8"));
                }
                let n = m / 4;
                let two_n = 2 * n;
                // Element a^k x^e is point k + 2n·e.
                let mul = |(k, e): (usize, usize), (l, f): (usize, usize)| -> (usize, usize) {
                    match (e, f) {
                        (0, _) => ((k + l) % two_n, f),
                        (1, 0) => ((k + two_n - l) % two_n, 1),
                        _ => ((k + two_n - l + n) % two_n, 0),
                    }
                };
                let right = |g: (usize, usize)| {
                    images(
                        (0..m)
                            .map(|pt| {
                                let (k, e) = mul((pt % two_n, pt / two_n), g);
                                k + two_n * e
                            })
                            .collect(),
                    )
                };
                (m, vec![right((1, 0)), right((0, 1))])
            }
            BuiltinSpec::Symmetric(n) => {
                if n == 0 {
                    return Err(range_error(self, "degree must be positive"));
                }
                if n == 1 {
                    (1, vec![])
                } else {
                    (n, vec![perm(n, &[vec![0, 1]]), perm(n, &[(0..n).collect()])])
                }
            }
            BuiltinSpec::Alternating(n) => {
                if n == 0 {
                    return Err(range_error(self, "degree must be positive"));
                }
                (n, (2..n).map(|i| perm(n, &[vec![0, 1, i]])).collect())
            }
            BuiltinSpec::ElementaryAbelian(p, k) => {
                if !is_prime(p) || k == 0 {
                    return Err(range_error(self, "needs a prime p and k ≥ 1"));
                }
                let p = p as usize;
                let degree = p * k as usize;
                let gens = (0..k as usize)
                    .map(|i| perm(degree, &[(i * p..(i + 1) * p).collect()]))
                    .collect();
                (degree, gens)
            }
            BuiltinSpec::Heisenberg(p) => {
                if !is_prime(p) {
                    return Err(range_error(self, "p must be prime"));
                }
                let p = p as usize;
                let degree = p * p * p;
                let index = |x: usize, y: usize, z: usize| x + p * y + p * p * z;
                let act = |f: &dyn Fn(usize, usize, usize) -> (usize, usize, usize)| {
                    let mut v = vec![0; degree];
                    for z in 0..p {
                        for y in 0..p {
                            for x in 0..p {
                                let (a, b, c) = f(x, y, z);
                                v[index(x, y, z)] = index(a, b, c);
                            }
                        }
                    }
                    images(v)
                };
                let e12 = act(&|x, y, z| (x, (y + x) % p, z));
                let e23 = act(&|x, y, z| (x, y, (z + y) % p));
                (degree, vec![e12, e23])
            }
            BuiltinSpec::Frobenius21 => (
                7,
                vec![
                    perm(7, &[(0..7).collect()]),
                    images((0..7).map(|x| 2 * x % 7).collect()),
                ],
            ),
            BuiltinSpec::Psl2(q) => {
                let field =
                    FiniteField::new(q).ok_or_else(|| range_error(self, "q must be one of 3, 4, 5, 7, 8, 9"))?;
                (q as usize + 1, field.psl2_generators())
            }
            BuiltinSpec::Sl2(q) => {
                let field =
                    FiniteField::new(q).ok_or_else(|| range_error(self, "q must be one of 3, 4, 5, 7, 8, 9"))?;
                (q as usize * q as usize - 1, field.sl2_generators())
            }
            BuiltinSpec::DirectProduct(ref a, ref b) => {
                let (da, ga) = a.generators()?;
                let (db, gb) = b.generators()?;
                let degree = da + db;
                let mut gens = Vec::new();
                for g in &ga {
                    gens.push(images(
                        (0..degree).map(|i| if i < da { g.image(i) } else { i }).collect(),
                    ));
                }
                for g in &gb {
                    gens.push(images(
                        (0..degree)
                            .map(|i| if i < da { i } else { da + g.image(i - da) })
                            .collect(),
                    ));
                }
                (degree, gens)
            }
        })
    }

    /// Builds the group under the given caps.
    pub fn build(&self, caps: Caps) -> Result<Arc<Group>> {
        let (degree, gens) = self.generators()?;
        Group::generate(degree, &gens, caps)
    }
}

/// GF(q) for the few q the catalog needs, elements encoded as base-p digit strings.
struct FiniteField {
    p: usize,
    q: usize,
    /// Coefficients of the reduction polynomial below the leading term.
    modulus: Vec<usize>,
}

impl FiniteField {
    fn new(q: u64) -> Option<FiniteField> {
        let (p, modulus) = match q {
            3 | 5 | 7 => (q as usize, vec![]),
            4 => (2, vec![1, 1]),    // x² = x + 1
            8 => (2, vec![1, 1, 0]), // x³ = x + 1
            9 => (3, vec![2, 0]),    // x² = -1
            _ => return None,
        };
        Some(FiniteField {
            p,
            q: q as usize,
            modulus,
        })
    }

    fn digits(&self, a: usize) -> Vec<usize> {
        let k = self.modulus.len().max(1);
        let mut out = vec![0; k];
        let mut a = a;
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<usize> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    fn neg(&self, a: usize) -> usize {
        let s: Vec<usize> = self.digits(a).iter().map(|d| (self.p - d) % self.p).collect();
        self.encode(&s)
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        if self.modulus.is_empty() {
            return a * b % self.p;
        }
        let k = self.modulus.len();
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = vec![0; 2 * k - 1];
        for (i, u) in x.iter().enumerate() {
            for (j, v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % self.p;
            }
        }
        for deg in (k..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, m) in self.modulus.iter().enumerate() {
                // modulus lists the coefficients of x^0 … x^{k-1}
                let target = deg - k + i;
                prod[target] = (prod[target] + c * m) % self.p;
            }
        }
        self.encode(&prod[..k])
    }

    fn inv(&self, a: usize) -> usize {
        (1..self.q)
            .find(|&b| self.mul(a, b) == 1)
            .expect("nonzero elements are invertible")
    }

    fn primitive(&self) -> usize {
        (2..self.q)
            .chain(std::iter::once(1))
            .find(|&g| {
                let mut x = g;
                let mut n = 1;
                while x != 1 {
                    x = self.mul(x, g);
                    n += 1;
                }
                n == self.q - 1
            })
            .expect("multiplicative group is cyclic")
    }

    /// Möbius map `z ↦ (az + b)/(cz + d)` on the points `0..q` plus `∞ = q`.
    fn mobius(&self, a: usize, b: usize, c: usize, d: usize) -> Permutation {
        let inf = self.q;
        let map = |z: usize| -> usize {
            let (num, den) = if z == inf {
                (a, c)
            } else {
                (self.add(self.mul(a, z), b), self.add(self.mul(c, z), d))
            };
            if den == 0 {
                inf
            } else {
                self.mul(num, self.inv(den))
            }
        };
        images((0..=self.q).map(map).collect())
    }

    /// The matrix `[[a, b], [c, d]]` acting on nonzero column vectors `(x, y)`,
    /// encoded as `x·q + y − 1`.
    fn linear(&self, a: usize, b: usize, c: usize, d: usize) -> Permutation {
        let q = self.q;
        images(
            (1..q * q)
                .map(|v| {
                    let (x, y) = (v / q, v % q);
                    let nx = self.add(self.mul(a, x), self.mul(b, y));
                    let ny = self.add(self.mul(c, x), self.mul(d, y));
                    nx * q + ny - 1
                })
                .collect(),
        )
    }

    fn sl2_generators(&self) -> Vec<Permutation> {
        vec![self.linear(1, 1, 0, 1), self.linear(0, self.neg(1), 1, 0)]
    }

    fn psl2_generators(&self) -> Vec<Permutation> {
        let lambda = self.primitive();
        let lambda2 = self.mul(lambda, lambda);
        vec![
            self.mobius(1, 1, 0, 1),
            self.mobius(lambda2, 0, 0, 1),
            self.mobius(0, self.neg(1), 1, 0),
        ]
    }
}

/// Parses a family call such as `dihedral(8)` or an alias such as `D8`,
/// `Q8`, `Dic12`, `C2^2`, `Heis3`, `F21`, `PSL(2,7)` or `S3xC3`.
pub fn parse_spec(text: &str) -> Result<BuiltinSpec> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::validation("empty group specification"));
    }
    if let Some((a, b)) = split_top_level(&s, 'x') {
        return Ok(BuiltinSpec::DirectProduct(
            Box::new(parse_spec(a)?),
            Box::new(parse_spec(b)?),
        ));
    }
    if let Some(open) = s.find('(') {
        if !s.ends_with(')') {
            return Err(Error::validation(format!("unbalanced parentheses in `{s}`")));
        }
        let name = &s[..open];
        let inner = &s[open + 1..s.len() - 1];
        let args = split_args(inner);
        let int = |i: usize| -> Result<u64> {
            args.get(i)
                .ok_or_else(|| Error::validation(format!("`{s}` is missing argument {}", i + 1)))?
                .parse::<u64>()
                .map_err(|_| Error::validation(format!("`{s}`: argument {} is not an integer", i + 1)))
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::validation(format!(
                    "`{name}` takes {n} argument(s), got {}",
                    args.len()
                )))
            }
        };
        return match name {
            "cyclic" => arity(1).and(Ok(BuiltinSpec::Cyclic(int(0)? as usize))),
            "dihedral" => arity(1).and(Ok(BuiltinSpec::Dihedral(int(0)? as usize))),
            "dicyclic" => arity(1).and(Ok(BuiltinSpec::Dicyclic(int(0)? as usize))),
            "symmetric" => arity(1).and(Ok(BuiltinSpec::Symmetric(int(0)? as usize))),
            "alternating" => arity(1).and(Ok(BuiltinSpec::Alternating(int(0)? as usize))),
            "elementary_abelian" => arity(2).and(Ok(BuiltinSpec::ElementaryAbelian(int(0)?, int(1)? as u32))),
            "heisenberg" => arity(1).and(Ok(BuiltinSpec::Heisenberg(int(0)?))),
            "psl2" => arity(1).and(Ok(BuiltinSpec::Psl2(int(0)?))),
            "sl2" => arity(1).and(Ok(BuiltinSpec::Sl2(int(0)?))),
            "SL" => {
                arity(2)?;
                if int(0)? != 2 {
                    return Err(Error::validation("only SL(2,q) is available"));
                }
                Ok(BuiltinSpec::Sl2(int(1)?))
            }
            "PSL" => {
                arity(2)?;
                if int(0)? != 2 {
                    return Err(Error::validation("only PSL(2,q) is available"));
                }
                Ok(BuiltinSpec::Psl2(int(1)?))
            }
            "direct_product" => {
                arity(2)?;
                Ok(BuiltinSpec::DirectProduct(
                    Box::new(parse_spec(args[0])?),
                    Box::new(parse_spec(args[1])?),
                ))
            }
            _ => Err(Error::validation(format!("unknown group family `{name}`"))),
        };
    }
    parse_alias(&s)
}

fn parse_alias(s: &str) -> Result<BuiltinSpec> {
    let unknown = || Error::validation(format!("unknown group `{s}`"));
    let num = |t: &str| t.parse::<u64>().map_err(|_| unknown());
    match s {
        "frobenius21" | "F21" => return Ok(BuiltinSpec::Frobenius21),
        "Q8" => return Ok(BuiltinSpec::Dicyclic(8)),
        "V4" => return Ok(BuiltinSpec::ElementaryAbelian(2, 2)),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("Heis") {
        return Ok(BuiltinSpec::Heisenberg(num(rest)?));
    }
    if let Some(rest) = s.strip_prefix("Dic") {
        return Ok(BuiltinSpec::Dicyclic(num(rest)? as usize));
    }
    if let Some(rest) = s.strip_prefix('C') {
        if let Some((p, k)) = rest.split_once('^') {
            return Ok(BuiltinSpec::ElementaryAbelian(num(p)?, num(k)? as u32));
        }
        return Ok(BuiltinSpec::Cyclic(num(rest)? as usize));
    }
    if let Some(rest) = s.strip_prefix('D') {
        return Ok(BuiltinSpec::Dihedral(num(rest)? as usize));
    }
    if let Some(rest) = s.strip_prefix('S') {
        return Ok(BuiltinSpec::Symmetric(num(rest)? as usize));
    }
    if let Some(rest) = s.strip_prefix('A') {
        return Ok(BuiltinSpec::Alternating(num(rest)? as usize));
    }
    Err(unknown())
}

/// Splits at the last occurrence of `sep` outside parentheses.
fn split_top_level(s: &str, sep: char) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let mut at = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => at = Some(i),
            _ => {}
        }
    }
    at.map(|i| (&s[..i], &s[i + sep.len_utf8()..]))
}

fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s.is_empty() {
        out.push(&s[start..]);
    }
    out
}

/// Parses and builds a catalog group.
pub fn builtin_group(spec: &str, caps: Caps) -> Result<Arc<Group>> {
    parse_spec(spec)?.build(caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(s: &str) -> usize {
        builtin_group(s, Caps::default()).unwrap().order()
    }

    #[test]
    fn catalog_orders() {
        assert_eq!(order("cyclic(12)"), 12);
        let d8 = builtin_group("dihedral(8)", Caps::default()).unwrap();
        assert_eq!((d8.order(), d8.degree()), (8, 4));
        assert_eq!(order("dihedral(4)"), 4);
        assert_eq!(order("dihedral(16)"), 16);
        assert_eq!(order("dicyclic(8)"), 8);
        assert_eq!(order("Dic12"), 12);
        assert_eq!(order("S4"), 24);
        assert_eq!(order("A4"), 12);
        assert_eq!(order("A5"), 60);
        assert_eq!(order("C2^2"), 4);
        assert_eq!(order("Heis3"), 27);
        let f21 = builtin_group("frobenius21", Caps::default()).unwrap();
        assert_eq!((f21.order(), f21.degree()), (21, 7));
        let psl = builtin_group("PSL(2,7)", Caps::default()).unwrap();
        assert_eq!((psl.order(), psl.degree()), (168, 8));
        assert_eq!(order("psl2(4)"), 60);
        assert_eq!(order("psl2(5)"), 60);
        assert_eq!(order("psl2(8)"), 504);
        assert_eq!(order("psl2(9)"), 360);
        assert_eq!(order("SL(2,3)"), 24);
        assert_eq!(order("sl2(5)"), 120);
        assert_eq!(order("S3xC3"), 18);
        assert_eq!(order("direct_product(symmetric(3),cyclic(3))"), 18);
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q8 = builtin_group("Q8", Caps::default()).unwrap();
        assert_eq!(q8.elements().filter(|&x| q8.elem_order(x) == 2).count(), 1);
        let dic12 = builtin_group("dicyclic(12)", Caps::default()).unwrap();
        assert_eq!(dic12.elements().filter(|&x| dic12.elem_order(x) == 2).count(), 1);
    }

    #[test]
    fn heisenberg_has_exponent_p() {
        let h = builtin_group("heisenberg(3)", Caps::default()).unwrap();
        assert!(h.elements().all(|x| h.elem_order(x) <= 3));
        assert!(!h.whole().is_abelian());
    }

    #[test]
    fn bad_specs_are_rejected() {
        for s in [
            "dihedral(7)",
            "dicyclic(6)",
            "psl2(11)",
            "elementary_abelian(4,2)",
            "nope(3)",
            "Z9",
            "cyclic(0)",
        ] {
            assert!(
                matches!(builtin_group(s, Caps::default()), Err(Error::Validation(_))),
                "{s}"
            );
        }
        assert!(builtin_group("heisenberg(5)", Caps::default())
            .unwrap_err()
            .is_capacity());
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "cyclic(4)",
            "psl2(7)",
            "direct_product(symmetric(3),cyclic(3))",
            "elementary_abelian(3,2)",
        ] {
            assert_eq!(parse_spec(s).unwrap().to_string(), s);
        }
    }
}
