//! The coefficients a_{i,k}(s) and b_{i,k}(s) by memoized recursion.
//!
//! a uses the unsymmetrized equation at the first edge e of the first component:
//!
//! m·a_{i,k}(s) = t₁t·a_{i,k−1}(s) + Σ_merge a_{i,k−1} + Σ_split a_{i,k}
//!              + ½Σ_deform a_{i−1,k} + ½Σ_expand a_{i−1,k}
//!
//! where every sum runs over operations on l₁ at the locations C₁ of e or e⁻¹, with `+`
//! for negative and `−` for positive operations. b uses the symmetrized form over the
//! whole catalog with every sign positive, divided by |s|.
//!
//! Base cases are a_{0,0}(∅) = 1 and a_{i,k}(∅) = 0 otherwise, a_{0,0}(s) = 0 for
//! non-null s. For non-null s and k ≥ 1 the recursion also runs at i = 0, so that genus
//! terms reached through mergers and inactions alone are kept.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ops::{entries_at, operation_catalog, Family, Sign};
use crate::sequence::LoopSequence;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Which {
    A,
    B,
}

type Key = (u32, u32, LoopSequence);

/// Memoized a and b tables. Safe to share between threads; inserts are idempotent.
pub struct CoeffTable {
    a: DashMap<Key, BigRational>,
    b: DashMap<Key, BigRational>,
    /// Return 0 early for states that no trajectory in X_{i,k} can empty.
    pub shortcuts: bool,
}

impl Default for CoeffTable {
    fn default() -> Self {
        Self::new()
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Sign and grade shift of an operation family inside the recursions.
fn grade_of(f: Family) -> (u32, u32, bool) {
    match f {
        Family::Merger | Family::Inaction => (0, 1, false),
        Family::Split => (0, 0, false),
        Family::Deform | Family::Expand => (1, 0, true),
    }
}

impl CoeffTable {
    pub fn new() -> Self {
        CoeffTable { a: DashMap::new(), b: DashMap::new(), shortcuts: true }
    }

    pub fn without_shortcuts() -> Self {
        CoeffTable { shortcuts: false, ..Self::new() }
    }

    pub fn get(&self, which: Which, i: i64, k: i64, s: &LoopSequence) -> BigRational {
        match which {
            Which::A => self.a(i, k, s),
            Which::B => self.b(i, k, s),
        }
    }

    fn base(&self, i: i64, k: i64, s: &LoopSequence) -> Option<BigRational> {
        if i < 0 || k < 0 {
            return Some(BigRational::zero());
        }
        if s.is_null() {
            return Some(if i == 0 && k == 0 { BigRational::one() } else { BigRational::zero() });
        }
        if i == 0 && k == 0 {
            return Some(BigRational::zero());
        }
        if self.shortcuts && !crate::enumerate::can_vanish_within(s, i as u32, i as u32, k as u32, true) {
            return Some(BigRational::zero());
        }
        None
    }

    pub fn a(&self, i: i64, k: i64, s: &LoopSequence) -> BigRational {
        if let Some(v) = self.base(i, k, s) {
            return v;
        }
        let key = (i as u32, k as u32, s.clone());
        if let Some(v) = self.a.get(&key) {
            return v.clone();
        }
        let v = self.a_step(i, k, s);
        if let Some(old) = self.a.insert(key, v.clone()) {
            debug_assert_eq!(old, v);
        }
        v
    }

    fn a_step(&self, i: i64, k: i64, s: &LoopSequence) -> BigRational {
        let l1 = &s.loops()[0];
        let e = l1.edges()[0].clone();
        let occ = s.occurrences(&e);
        let c1 = occ.c(0);
        let m = c1.len() as i64;
        let mut acc = int(occ.t_r(0) * occ.t()) * self.a(i, k - 1, s);
        let mut entries = Vec::new();
        for &x in &c1 {
            entries_at(s, 1, x, &mut entries);
        }
        for en in &entries {
            let (di, dk, halve) = grade_of(en.op.kind.family());
            let mut v = self.a(i - di as i64, k - dk as i64, &en.result);
            if v.is_zero() {
                continue;
            }
            if halve {
                v *= half();
            }
            match en.op.kind.sign() {
                Some(Sign::Plus) => acc -= v,
                _ => acc += v,
            }
        }
        acc / int(m)
    }

    pub fn b(&self, i: i64, k: i64, s: &LoopSequence) -> BigRational {
        if let Some(v) = self.base(i, k, s) {
            return v;
        }
        let key = (i as u32, k as u32, s.clone());
        if let Some(v) = self.b.get(&key) {
            return v.clone();
        }
        let v = self.b_step(i, k, s);
        if let Some(old) = self.b.insert(key, v.clone()) {
            debug_assert_eq!(old, v);
        }
        v
    }

    fn b_step(&self, i: i64, k: i64, s: &LoopSequence) -> BigRational {
        let cat = operation_catalog(s).expect("non-null");
        let mut acc = BigRational::zero();
        for en in &cat.entries {
            let family = en.op.kind.family();
            let (di, dk, halve) = grade_of(family);
            let mut v = self.b(i - di as i64, k - dk as i64, &en.result);
            if v.is_zero() {
                continue;
            }
            if family == Family::Inaction {
                v *= int(s.ell() as i64);
            }
            if halve {
                v *= half();
            }
            acc += v;
        }
        acc / int(s.len() as i64)
    }

    /// Number of memoized (a, b) entries.
    pub fn len(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }

    /// All memoized entries, sorted by (i, k, sequence).
    pub fn export(&self) -> Vec<CoeffRecord> {
        let mut merged: HashMap<Key, (Option<BigRational>, Option<BigRational>)> = HashMap::new();
        for r in self.a.iter() {
            merged.entry(r.key().clone()).or_default().0 = Some(r.value().clone());
        }
        for r in self.b.iter() {
            merged.entry(r.key().clone()).or_default().1 = Some(r.value().clone());
        }
        let mut out: Vec<(Key, CoeffRecord)> = merged
            .into_iter()
            .map(|(key, (a, b))| {
                let rec = CoeffRecord::new(key.0, key.1, &key.2, a.as_ref(), b.as_ref());
                (key, rec)
            })
            .collect();
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out.into_iter().map(|(_, r)| r).collect()
    }

    /// Merge records into the memo tables. Records that fail to parse are skipped.
    pub fn import(&self, records: &[CoeffRecord]) -> usize {
        let mut n = 0;
        for r in records {
            let Ok((s, _)) = crate::word::parse_sequence(&r.loop_words) else { continue };
            let key = (r.i, r.k, s);
            if let (Some(num), Some(den)) = (&r.a_num, &r.a_den) {
                if let Some(v) = ratio(num, den) {
                    self.a.insert(key.clone(), v);
                    n += 1;
                }
            }
            if let (Some(num), Some(den)) = (&r.b_num, &r.b_den) {
                if let Some(v) = ratio(num, den) {
                    self.b.insert(key, v);
                    n += 1;
                }
            }
        }
        n
    }

    /// Load `coefficients.jsonl` from a cache directory, if present.
    pub fn load_dir(&self, dir: &Path) -> std::io::Result<usize> {
        let path = dir.join(CACHE_FILE);
        if !path.exists() {
            return Ok(0);
        }
        let mut recs = Vec::new();
        for line in BufReader::new(fs::File::open(path)?).lines() {
            if let Ok(r) = serde_json::from_str::<CoeffRecord>(&line?) {
                recs.push(r);
            }
        }
        Ok(self.import(&recs))
    }

    /// Rewrite `coefficients.jsonl` in a cache directory with every memoized entry.
    pub fn save_dir(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!("{CACHE_FILE}.tmp"));
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        for r in self.export() {
            writeln!(f, "{}", serde_json::to_string(&r).expect("serializable"))?;
        }
        f.flush()?;
        drop(f);
        fs::rename(tmp, dir.join(CACHE_FILE))
    }
}

pub const CACHE_FILE: &str = "coefficients.jsonl";

fn ratio(num: &str, den: &str) -> Option<BigRational> {
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

/// Hex SHA-256 of the canonical sequence word.
pub fn sequence_key(s: &LoopSequence) -> String {
    let digest = Sha256::digest(s.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// One exported table row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub i: u32,
    pub k: u32,
    pub sequence_key: String,
    pub loop_words: String,
    pub a_num: Option<String>,
    pub a_den: Option<String>,
    pub b_num: Option<String>,
    pub b_den: Option<String>,
}

impl CoeffRecord {
    pub fn new(i: u32, k: u32, s: &LoopSequence, a: Option<&BigRational>, b: Option<&BigRational>) -> Self {
        CoeffRecord {
            i,
            k,
            sequence_key: sequence_key(s),
            loop_words: s.to_string(),
            a_num: a.map(|v| v.numer().to_string()),
            a_den: a.map(|v| v.denom().to_string()),
            b_num: b.map(|v| v.numer().to_string()),
            b_den: b.map(|v| v.denom().to_string()),
        }
    }
}

/// Catalan-type bound K^{(5+2k)i+ι(δ)}|δ|^{3k}ΠC_{δ_j−1} with K = 1024d, exactly.
pub fn coefficient_bound(i: u32, k: u32, s: &LoopSequence, d: usize) -> BigInt {
    let kk = BigInt::from(1024 * d as u64);
    let exp = (5 + 2 * k as u64) * i as u64 + s.index() as u64;
    let mut v = num_traits::pow(kk, exp as usize);
    v *= num_traits::pow(BigInt::from(s.len() as u64), 3 * k as usize);
    for deg in s.degrees() {
        v *= BigInt::from(crate::catalan::catalan(deg as u64 - 1));
    }
    v
}

/// |a| ≤ b ≤ bound and b ≥ 0.
pub fn check_bounds(a: &BigRational, b: &BigRational, bound: &BigInt) -> bool {
    !b.is_negative() && a.abs() <= *b && *b <= BigRational::from_integer(bound.clone())
}
