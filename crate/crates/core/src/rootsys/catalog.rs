use std::fmt;
use std::str::FromStr;

use super::datum::RootDatum;
use crate::error::{FoldError, Result};
use crate::scalars::{QuadraticAlgebra, Rational};
use crate::weilmod::{FoldedSpace, UVector};

/// Built-in realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `A_{2n-1} → C_n` over `k = Z[1/2]`.
    A2C(usize),
    /// `D_{n+1} → B_n` over `k = Z[1/2]`.
    D2B(usize),
    /// `E_8 → H_4` via icosians over `k = Z[1/5]`.
    E8H4,
    /// `D_6 → H_3`, a parabolic piece of the icosian realization.
    D6H3,
    /// `A_4 → H_2`, a parabolic piece of the icosian realization.
    A4H2,
    /// Plain `A_n` in the standard coordinates, without a folding.
    A(usize),
}

pub const FOLDED_FAMILIES: [Family; 6] =
    [Family::A2C(2), Family::A2C(3), Family::D2B(3), Family::A4H2, Family::D6H3, Family::E8H4];

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A2C(n) => write!(f, "a2c{n}"),
            Family::D2B(n) => write!(f, "d2b{n}"),
            Family::E8H4 => write!(f, "e8h4"),
            Family::D6H3 => write!(f, "d6h3"),
            Family::A4H2 => write!(f, "a4h2"),
            Family::A(n) => write!(f, "a{n}"),
        }
    }
}

impl FromStr for Family {
    type Err = FoldError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let param = |rest: &str, min: usize| -> Result<usize> {
            let n: usize = rest.parse().map_err(|_| FoldError::Config(format!("unknown family '{s}'")))?;
            if n < min {
                return Err(FoldError::Config(format!("family '{s}' needs n >= {min}")));
            }
            Ok(n)
        };
        match s.as_str() {
            "e8h4" => Ok(Family::E8H4),
            "d6h3" => Ok(Family::D6H3),
            "a4h2" => Ok(Family::A4H2),
            _ => {
                if let Some(rest) = s.strip_prefix("a2c") {
                    Ok(Family::A2C(param(rest, 2)?))
                } else if let Some(rest) = s.strip_prefix("d2b") {
                    Ok(Family::D2B(param(rest, 2)?))
                } else if let Some(rest) = s.strip_prefix('a') {
                    Ok(Family::A(param(rest, 1)?))
                } else {
                    Err(FoldError::Config(format!("unknown family '{s}'")))
                }
            }
        }
    }
}

impl Family {
    pub fn is_folded(&self) -> bool {
        !matches!(self, Family::A(_))
    }

    pub fn describe(&self) -> String {
        match self {
            Family::A2C(n) => format!("A{} -> C{n} (split, k = Z[1/2])", 2 * n - 1),
            Family::D2B(n) => format!("D{} -> B{n} (split, k = Z[1/2])", n + 1),
            Family::E8H4 => "E8 -> H4 (golden, k = Z[1/5])".into(),
            Family::D6H3 => "D6 -> H3 (golden, k = Z[1/5])".into(),
            Family::A4H2 => "A4 -> H2 (golden, k = Z[1/5])".into(),
            Family::A(n) => format!("A{n} (no folding)"),
        }
    }

    /// A nontrivial 𝒯-preserved Θ used by default in verification suites.
    pub fn default_theta(&self) -> Vec<&'static str> {
        match self {
            Family::A2C(2) => vec!["a2"],
            Family::A2C(3) => vec!["a1", "a5"],
            Family::A2C(_) => vec!["a1"],
            Family::D2B(_) => vec!["a1"],
            Family::E8H4 => vec!["a2", "a3", "a4", "a5", "a6", "a8"],
            Family::D6H3 => vec!["a2", "a6"],
            Family::A4H2 => vec!["a3", "a5"],
            Family::A(_) => vec![],
        }
    }
}

const ICOSIAN: [(&str, [(i64, i64); 4]); 8] = [
    ("a1", [(-1, 1), (0, -1), (0, 0), (-1, 0)]),
    ("a2", [(0, 0), (-1, 1), (0, -1), (1, 0)]),
    ("a3", [(0, 0), (1, 0), (-1, 1), (0, -1)]),
    ("a4", [(0, 0), (0, -1), (1, 0), (1, 1)]),
    ("a5", [(0, 0), (0, 1), (1, 0), (-1, -1)]),
    ("a6", [(0, 0), (1, 0), (-1, -1), (0, 1)]),
    ("a7", [(1, 0), (-1, -1), (0, 0), (0, -1)]),
    ("a8", [(0, 0), (-1, 0), (-1, 1), (0, 1)]),
];

fn icosian_subset(keep: &[&str]) -> Result<RootDatum> {
    let alg = QuadraticAlgebra::golden(&[5])?;
    let space = FoldedSpace::new(4, alg)?;
    let (names, roots): (Vec<String>, Vec<UVector>) = ICOSIAN
        .iter()
        .filter(|(n, _)| keep.contains(n))
        .map(|(n, p)| (n.to_string(), UVector::from_pairs(p)))
        .unzip();
    RootDatum::new(space, names, roots)
}

fn split_space(slots: usize) -> Result<FoldedSpace> {
    FoldedSpace::new(slots, QuadraticAlgebra::split(&[2])?)
}

/// `ε_i ↦` flat coordinate vector in `U` under the map
/// `(y_1..y_2n) ↦ ((-y_2n, y_1), (-y_{2n-1}, y_2), ..)`.
fn a2c_epsilon(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0); 2 * n];
    if i <= n {
        v[2 * (i - 1) + 1] = Rational::from_integer(1);
    } else {
        let slot = 2 * n - i + 1;
        v[2 * (slot - 1)] = Rational::from_integer(-1);
    }
    v
}

fn diff(a: &[Rational], b: &[Rational]) -> UVector {
    UVector::new(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

pub fn catalog_build(family: Family) -> Result<RootDatum> {
    match family {
        Family::E8H4 => icosian_subset(&["a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"]),
        Family::D6H3 => icosian_subset(&["a2", "a3", "a4", "a5", "a6", "a8"]),
        Family::A4H2 => icosian_subset(&["a3", "a4", "a5", "a8"]),
        Family::A2C(n) => {
            if n < 2 {
                return Err(FoldError::Config("a2c needs n >= 2".into()));
            }
            let eps: Vec<Vec<Rational>> = (1..=2 * n).map(|i| a2c_epsilon(n, i)).collect();
            let roots = (0..2 * n - 1).map(|i| diff(&eps[i], &eps[i + 1])).collect();
            RootDatum::new(split_space(n)?, super::system::names("a", 2 * n - 1), roots)
        }
        Family::D2B(n) => {
            if n < 2 {
                return Err(FoldError::Config("d2b needs n >= 2".into()));
            }
            let mut eps: Vec<Vec<Rational>> = Vec::new();
            for i in 1..=n {
                let mut v = vec![Rational::from_integer(0); 2 * n];
                v[2 * (i - 1)] = Rational::from_integer(1);
                v[2 * (i - 1) + 1] = Rational::from_integer(1);
                eps.push(v);
            }
            let mut last = vec![Rational::from_integer(0); 2 * n];
            last[2 * (n - 1)] = Rational::from_integer(1);
            last[2 * (n - 1) + 1] = Rational::from_integer(-1);
            eps.push(last);
            let mut roots: Vec<UVector> = (0..n).map(|i| diff(&eps[i], &eps[i + 1])).collect();
            roots.push(UVector::new(eps[n - 1].iter().zip(&eps[n]).map(|(x, y)| x + y).collect()));
            RootDatum::new(split_space(n)?, super::system::names("a", n + 1), roots)
        }
        Family::A(n) => {
            if n < 1 {
                return Err(FoldError::Config("type A needs n >= 1".into()));
            }
            let slots = (n + 2) / 2;
            let eps: Vec<Vec<Rational>> = (0..=n)
                .map(|i| {
                    let mut v = vec![Rational::from_integer(0); 2 * slots];
                    v[i] = Rational::from_integer(1);
                    v
                })
                .collect();
            let roots = (0..n).map(|i| diff(&eps[i], &eps[i + 1])).collect();
            RootDatum::new(split_space(slots)?, super::system::names("a", n), roots)
        }
    }
}

/// Resolves a Θ specification (`""`, `"none"`, a preset such as `"d6"`, or a
/// comma-separated list of root names) to simple-root indices.
pub fn parse_theta(datum: &RootDatum, family: Family, spec: &str) -> Result<Vec<usize>> {
    let spec = spec.trim();
    let names: Vec<String> = match spec {
        "" | "none" | "empty" => Vec::new(),
        "d6" if family == Family::E8H4 => {
            ["a2", "a3", "a4", "a5", "a6", "a8"].iter().map(|s| s.to_string()).collect()
        }
        "default" => family.default_theta().iter().map(|s| s.to_string()).collect(),
        _ => spec.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
    };
    let mut out = Vec::new();
    for n in &names {
        let i = datum
            .index_of(n)
            .ok_or_else(|| FoldError::Config(format!("unknown simple root '{n}' for family {family}")))?;
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_family_names() {
        assert_eq!("a2c3".parse::<Family>().unwrap(), Family::A2C(3));
        assert_eq!("D2B4".parse::<Family>().unwrap(), Family::D2B(4));
        assert_eq!("a2".parse::<Family>().unwrap(), Family::A(2));
        assert_eq!("e8h4".parse::<Family>().unwrap(), Family::E8H4);
        assert!("f4".parse::<Family>().is_err());
        assert!("a2c1".parse::<Family>().is_err());
        for f in FOLDED_FAMILIES {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn coordinates_match_examples() {
        let e8 = catalog_build(Family::E8H4).unwrap();
        assert_eq!(e8.simple_roots()[3], UVector::from_pairs(&[(0, 0), (0, -1), (1, 0), (1, 1)]));
        let a2c = catalog_build(Family::A2C(2)).unwrap();
        assert_eq!(a2c.simple_roots()[1], UVector::from_pairs(&[(0, 0), (1, 1)]));
        assert_eq!(a2c.simple_roots()[0], UVector::from_pairs(&[(0, 1), (0, -1)]));
        assert_eq!(a2c.simple_roots()[2], UVector::from_pairs(&[(1, 0), (-1, 0)]));
        let d2b = catalog_build(Family::D2B(3)).unwrap();
        assert_eq!(d2b.simple_roots()[2], UVector::from_pairs(&[(0, 0), (0, 0), (0, 2)]));
        assert_eq!(d2b.simple_roots()[3], UVector::from_pairs(&[(0, 0), (0, 0), (2, 0)]));
    }

    #[test]
    fn positive_root_counts() {
        let cases = [
            (Family::E8H4, 120),
            (Family::D6H3, 30),
            (Family::A4H2, 10),
            (Family::A2C(2), 6),
            (Family::A2C(3), 15),
            (Family::D2B(3), 12),
            (Family::A(3), 6),
        ];
        for (f, n) in cases {
            assert_eq!(catalog_build(f).unwrap().system().num_positive(), n, "{f}");
        }
    }

    #[test]
    fn partitions() {
        let p = catalog_build(Family::A2C(2)).unwrap().validate_folded_rep().unwrap();
        assert_eq!(p.rational(), vec![0]);
        assert_eq!(p.invariant, vec![1]);
        assert_eq!(p.image(), vec![2]);
        let p = catalog_build(Family::D2B(3)).unwrap().validate_folded_rep().unwrap();
        assert_eq!(p.rational(), vec![2]);
        assert_eq!(p.invariant, vec![0, 1]);
        let p = catalog_build(Family::E8H4).unwrap().validate_folded_rep().unwrap();
        assert_eq!(p.pairs, vec![(0, 6), (1, 5), (2, 4), (7, 3)]);
        assert!(p.invariant.is_empty());
        assert!(catalog_build(Family::A(2)).unwrap().validate_folded_rep().is_err());
    }

    #[test]
    fn theta_parsing() {
        let e8 = catalog_build(Family::E8H4).unwrap();
        assert_eq!(parse_theta(&e8, Family::E8H4, "d6").unwrap(), vec![1, 2, 3, 4, 5, 7]);
        assert_eq!(parse_theta(&e8, Family::E8H4, "").unwrap(), Vec::<usize>::new());
        assert!(parse_theta(&e8, Family::E8H4, "a9").is_err());
    }
}
