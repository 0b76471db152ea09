//! FCIDUMP reading and writing.
//!
//! Two-electron integrals are kept in chemist notation `(pq|rs)` with the full
//! 8-fold permutational symmetry of real orbitals, packed so that each
//! symmetry-distinct value is stored once. Orbital indices are 0-based inside
//! the crate and 1-based in the file.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest orbital count accepted by the dense packed storage.
pub const MAX_ORBITALS: usize = 512;

/// Tolerance under which two copies of the same integral are considered equal.
pub const DUPLICATE_TOLERANCE: f64 = 1e-10;

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    if i >= j {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

/// One- and two-electron integrals of a molecule in an orthonormal orbital basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    pub core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
    pub orbsym: Vec<i64>,
    pub isym: i64,
}

impl IntegralSet {
    /// All-zero integral set.
    pub fn zeros(norb: usize, nelec: usize, ms2: i64) -> Result<Self> {
        if norb == 0 {
            return Err(Error::InvalidIntegrals("NORB must be positive".into()));
        }
        if norb > MAX_ORBITALS {
            return Err(Error::TooManyOrbitals {
                norb,
                max: MAX_ORBITALS,
            });
        }
        let npair = norb * (norb + 1) / 2;
        Ok(Self {
            norb,
            nelec,
            ms2,
            core_energy: 0.0,
            one_body: vec![0.0; norb * norb],
            two_body: vec![0.0; npair * (npair + 1) / 2],
            orbsym: vec![1; norb],
            isym: 1,
        })
    }

    pub fn norb(&self) -> usize {
        self.norb
    }

    /// One-electron integral `t_pq`.
    #[inline]
    pub fn t(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.norb + q]
    }

    pub fn set_t(&mut self, p: usize, q: usize, value: f64) {
        self.one_body[p * self.norb + q] = value;
        self.one_body[q * self.norb + p] = value;
    }

    #[inline]
    fn packed(p: usize, q: usize, r: usize, s: usize) -> usize {
        pair_index(pair_index(p, q), pair_index(r, s))
    }

    /// Two-electron integral `(pq|rs)`.
    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[Self::packed(p, q, r, s)]
    }

    /// Sets `(pq|rs)` and, implicitly, all of its permutational partners.
    pub fn set_eri(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        let idx = Self::packed(p, q, r, s);
        self.two_body[idx] = value;
    }

    /// Iterates over symmetry-distinct two-electron integrals as
    /// (canonical tuple, value), in packed-storage order.
    pub fn two_body_entries(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        let n = self.norb;
        (0..n).flat_map(move |p| {
            (0..=p).flat_map(move |q| {
                let pq = pair_index(p, q);
                (0..n).flat_map(move |r| {
                    (0..=r).filter_map(move |s| {
                        let rs = pair_index(r, s);
                        if rs > pq {
                            return None;
                        }
                        Some((canonical_tuple([p, q, r, s]), self.eri(p, q, r, s)))
                    })
                })
            })
        })
    }

    /// Checks electron count bounds and finiteness of every stored energy.
    pub fn validate(&self) -> Result<()> {
        if self.nelec < 1 || self.nelec > 2 * self.norb {
            return Err(Error::InvalidIntegrals(format!(
                "NELEC={} outside [1, {}]",
                self.nelec,
                2 * self.norb
            )));
        }
        if !self.core_energy.is_finite()
            || self.one_body.iter().any(|v| !v.is_finite())
            || self.two_body.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidIntegrals("non-finite integral".into()));
        }
        Ok(())
    }

    /// Largest absolute difference between two integral sets of equal shape.
    pub fn max_abs_diff(&self, other: &IntegralSet) -> Option<f64> {
        if self.norb != other.norb {
            return None;
        }
        let d1 = self
            .one_body
            .iter()
            .zip(&other.one_body)
            .map(|(a, b)| (a - b).abs());
        let d2 = self
            .two_body
            .iter()
            .zip(&other.two_body)
            .map(|(a, b)| (a - b).abs());
        Some(
            d1.chain(d2)
                .fold((self.core_energy - other.core_energy).abs(), f64::max),
        )
    }
}

/// Lexicographically smallest of the eight index permutations of `(pq|rs)`.
pub fn canonical_tuple([p, q, r, s]: [usize; 4]) -> [usize; 4] {
    let perms = [
        [p, q, r, s],
        [q, p, r, s],
        [p, q, s, r],
        [q, p, s, r],
        [r, s, p, q],
        [s, r, p, q],
        [r, s, q, p],
        [s, r, q, p],
    ];
    perms.into_iter().min().unwrap()
}

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
    orbsym: Vec<i64>,
    isym: i64,
}

fn parse_header(text: &str) -> Result<Header> {
    // collapse "KEY = v" into "KEY=v"
    let mut s = text.replace(['\t', '\n', '\r'], " ");
    loop {
        let next = s.replace(" =", "=").replace("= ", "=");
        if next == s {
            break;
        }
        s = next;
    }
    let mut entries: Vec<(String, Vec<String>)> = Vec::new();
    for token in s.split([' ', ',']).filter(|t| !t.is_empty()) {
        let upper = token.to_ascii_uppercase();
        if upper == "&FCI" || upper == "&END" || upper == "/" || upper == "&" || upper == "$END" {
            continue;
        }
        let upper = upper.trim_start_matches("&FCI").to_string();
        if let Some((key, value)) = upper.split_once('=') {
            let mut values = Vec::new();
            if !value.is_empty() {
                values.push(value.to_string());
            }
            entries.push((key.to_string(), values));
        } else if let Some(last) = entries.last_mut() {
            last.1.push(upper);
        } else {
            return Err(Error::Header(format!("unexpected token `{token}`")));
        }
    }
    let lookup = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, v)| v);
    let int = |key: &str| -> Result<Option<i64>> {
        match lookup(key) {
            None => Ok(None),
            Some(v) if v.len() == 1 => v[0]
                .parse::<i64>()
                .map(Some)
                .map_err(|_| Error::Header(format!("{key} is not an integer: `{}`", v[0]))),
            Some(v) => Err(Error::Header(format!("{key} expects one value, got {}", v.len()))),
        }
    };
    let norb = int("NORB")?.ok_or_else(|| Error::Header("missing NORB".into()))?;
    let nelec = int("NELEC")?.ok_or_else(|| Error::Header("missing NELEC".into()))?;
    if norb <= 0 {
        return Err(Error::Header(format!("NORB={norb} must be positive")));
    }
    if nelec < 0 {
        return Err(Error::Header(format!("NELEC={nelec} must be non-negative")));
    }
    let ms2 = int("MS2")?.unwrap_or(0);
    let isym = int("ISYM")?.unwrap_or(1);
    let orbsym = match lookup("ORBSYM") {
        None => vec![1; norb as usize],
        Some(v) => v
            .iter()
            .map(|x| {
                x.parse::<i64>()
                    .map_err(|_| Error::Header(format!("ORBSYM entry `{x}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(Header {
        norb: norb as usize,
        nelec: nelec as usize,
        ms2,
        orbsym,
        isym,
    })
}

fn parse_value(token: &str) -> Option<f64> {
    token.replace(['D', 'd'], "E").parse::<f64>().ok()
}

fn looks_like_body(line: &str) -> bool {
    let toks: Vec<&str> = line.split_whitespace().collect();
    toks.len() == 5 && parse_value(toks[0]).is_some() && toks[1..].iter().all(|t| t.parse::<i64>().is_ok())
}

struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }
    /// Marks `i`; returns whether it was already set.
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        let was = self.0[w] >> b & 1 == 1;
        self.0[w] |= 1 << b;
        was
    }
}

/// Parses FCIDUMP text into a validated [`IntegralSet`].
pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let lines: Vec<&str> = text.lines().collect();
    let mut header_end = None;
    let mut body_start = 0;
    for (i, line) in lines.iter().enumerate() {
        let upper = line.trim().to_ascii_uppercase();
        if upper.contains("&END") || upper.ends_with('/') || upper.contains("$END") {
            header_end = Some(i + 1);
            body_start = i + 1;
            break;
        }
        if looks_like_body(line) {
            header_end = Some(i);
            body_start = i;
            break;
        }
    }
    let header_end = header_end.ok_or_else(|| Error::Header("no header terminator and no integral lines".into()))?;
    if header_end == 0 {
        return Err(Error::Header("missing namelist header".into()));
    }
    let header = parse_header(&lines[..header_end].join(" "))?;
    let mut set = IntegralSet::zeros(header.norb, header.nelec, header.ms2)?;
    if header.orbsym.len() == header.norb {
        set.orbsym = header.orbsym;
    } else if !header.orbsym.is_empty() {
        log::warn!(
            "ORBSYM has {} entries for NORB={}; ignoring",
            header.orbsym.len(),
            header.norb
        );
    }
    set.isym = header.isym;

    let norb = set.norb;
    let mut seen_two = BitSet::new(set.two_body.len());
    let mut seen_one = BitSet::new(norb * norb);
    let mut seen_core = false;

    for (offset, raw) in lines[body_start..].iter().enumerate() {
        let lineno = body_start + offset + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `value i j k l`, found {} fields", toks.len()),
            });
        }
        let value = parse_value(toks[0]).ok_or_else(|| Error::Parse {
            line: lineno,
            message: format!("non-numeric value `{}`", toks[0]),
        })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let raw_idx: i64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("non-integer index `{tok}`"),
            })?;
            if raw_idx < 0 || raw_idx as usize > norb {
                return Err(Error::IndexOutOfRange {
                    line: lineno,
                    index: raw_idx,
                    norb,
                });
            }
            *slot = raw_idx as usize;
        }
        let [i, j, k, l] = idx;
        let duplicate = |first: f64, tuple: [usize; 4]| -> Result<()> {
            if (first - value).abs() > DUPLICATE_TOLERANCE {
                Err(Error::InconsistentDuplicate {
                    line: lineno,
                    tuple,
                    first,
                    second: value,
                })
            } else {
                Ok(())
            }
        };
        match (i > 0, j > 0, k > 0, l > 0) {
            (true, true, true, true) => {
                let (p, q, r, s) = (i - 1, j - 1, k - 1, l - 1);
                let slot = IntegralSet::packed(p, q, r, s);
                if seen_two.insert(slot) {
                    duplicate(set.two_body[slot], canonical_tuple(idx))?;
                }
                set.two_body[slot] = value;
            }
            (true, true, false, false) => {
                let (p, q) = (i.min(j) - 1, i.max(j) - 1);
                if seen_one.insert(p * norb + q) {
                    duplicate(set.t(p, q), [p + 1, q + 1, 0, 0])?;
                }
                set.set_t(p, q, value);
            }
            (false, false, false, false) => {
                if seen_core {
                    duplicate(set.core_energy, [0; 4])?;
                }
                seen_core = true;
                set.core_energy = value;
            }
            // orbital-energy records carry no information beyond t and h
            (true, false, false, false) => {}
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unsupported index pattern {i} {j} {k} {l}"),
                })
            }
        }
    }
    set.validate()?;
    Ok(set)
}

/// Reads an FCIDUMP from a path, or from standard input when the path is `-`.
pub fn read_fcidump(path: &Path) -> Result<IntegralSet> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)?
    };
    parse_fcidump(&text)
}

/// Serializes an integral set in canonical form: one line per symmetry-distinct
/// nonzero integral, 17 significant digits.
pub fn emit_fcidump(set: &IntegralSet) -> String {
    let mut out = String::new();
    let orbsym: Vec<String> = set.orbsym.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(
        out,
        "&FCI NORB={},NELEC={},MS2={},\n ORBSYM={},\n ISYM={},\n&END",
        set.norb,
        set.nelec,
        set.ms2,
        orbsym.join(","),
        set.isym
    );
    let line = |out: &mut String, v: f64, i: usize, j: usize, k: usize, l: usize| {
        let _ = writeln!(out, "{v:>25.16e} {i:>4} {j:>4} {k:>4} {l:>4}");
    };
    for ([p, q, r, s], v) in set.two_body_entries() {
        if v != 0.0 {
            line(&mut out, v, p + 1, q + 1, r + 1, s + 1);
        }
    }
    for p in 0..set.norb {
        for q in p..set.norb {
            let v = set.t(p, q);
            if v != 0.0 {
                line(&mut out, v, p + 1, q + 1, 0, 0);
            }
        }
    }
    line(&mut out, set.core_energy, 0, 0, 0, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const H2: &str = "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n\
        0.6744 1 1 1 1\n-1.2524 1 1 0 0\n0.7137 0 0 0 0\n";

    #[test]
    fn direct_field_mapping() {
        let s = parse_fcidump(H2).unwrap();
        assert_eq!(s.norb(), 2);
        assert_eq!(s.nelec, 2);
        assert_eq!(s.eri(0, 0, 0, 0), 0.6744);
        assert_eq!(s.t(0, 0), -1.2524);
        assert_eq!(s.core_energy, 0.7137);
    }

    #[test]
    fn bare_header_without_terminator() {
        let s = parse_fcidump("NORB=2,NELEC=2,MS2=0\n0.6744 1 1 1 1\n-1.2524 1 1 0 0\n0.7137 0 0 0 0\n").unwrap();
        assert_eq!(s.eri(0, 0, 0, 0), 0.6744);
        assert_eq!(s.core_energy, 0.7137);
    }

    #[test]
    fn slash_terminator_and_spaced_keys() {
        let text = "&FCI NORB = 2, NELEC = 2, MS2 = 0,\n ORBSYM = 1, 1,\n/\n0.5D0 1 2 0 0\n";
        let s = parse_fcidump(text).unwrap();
        assert_eq!(s.t(1, 0), 0.5);
        assert_eq!(s.orbsym, vec![1, 1]);
    }

    #[test]
    fn symmetry_expansion() {
        let s = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0 &END\n0.1813 1 2 1 2\n").unwrap();
        for [p, q, r, t] in [
            [0, 1, 0, 1],
            [1, 0, 0, 1],
            [0, 1, 1, 0],
            [1, 0, 1, 0],
        ] {
            assert_eq!(s.eri(p, q, r, t), 0.1813);
        }
        assert_eq!(s.eri(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn rejects_out_of_range_index() {
        let err = parse_fcidump("&FCI NORB=2,NELEC=2 &END\n0.1 1 3 1 1\n").unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { line: 2, index: 3, .. }), "{err}");
    }

    #[test]
    fn rejects_inconsistent_duplicate() {
        let err = parse_fcidump("&FCI NORB=2,NELEC=2 &END\n0.1 1 2 1 1\n0.2 2 1 1 1\n").unwrap_err();
        assert!(matches!(err, Error::InconsistentDuplicate { line: 3, .. }), "{err}");
        // equal within tolerance: last wins
        let ok = parse_fcidump("&FCI NORB=2,NELEC=2 &END\n0.1 1 2 1 1\n0.10000000000001 1 1 2 1\n").unwrap();
        assert_eq!(ok.eri(0, 0, 0, 1), 0.10000000000001);
    }

    #[test]
    fn rejects_non_numeric_value() {
        let err = parse_fcidump("&FCI NORB=2,NELEC=2 &END\nabc 1 1 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_missing_norb() {
        assert!(matches!(
            parse_fcidump("&FCI NELEC=2 &END\n0.1 1 1 1 1\n"),
            Err(Error::Header(_))
        ));
    }

    #[test]
    fn rejects_too_many_orbitals() {
        assert!(matches!(
            parse_fcidump("&FCI NORB=513,NELEC=2 &END\n"),
            Err(Error::TooManyOrbitals { .. })
        ));
    }

    #[test]
    fn emit_single_one_body() {
        let mut s = IntegralSet::zeros(1, 2, 0).unwrap();
        s.set_t(0, 0, -0.5);
        let text = emit_fcidump(&s);
        let body: Vec<&str> = text.lines().skip_while(|l| !l.contains("&END")).skip(1).collect();
        assert_eq!(body.len(), 2);
        let toks: Vec<&str> = body[0].split_whitespace().collect();
        assert_eq!(toks[0].parse::<f64>().unwrap(), -0.5);
        assert_eq!(&toks[1..], ["1", "1", "0", "0"]);
        // empty two-body: no four-index lines
        assert!(body.iter().all(|l| l.split_whitespace().nth(3) == Some("0")));
    }

    #[test]
    fn canonical_is_smallest_permutation() {
        assert_eq!(canonical_tuple([2, 1, 4, 3]), [1, 2, 3, 4]);
        assert_eq!(canonical_tuple([4, 3, 1, 2]), [1, 2, 3, 4]);
        assert_eq!(canonical_tuple([1, 1, 0, 0]), [0, 0, 1, 1]);
    }
}
