//! Witt polynomials, the universal addition/multiplication/negation laws and
//! truncated Witt vectors over finite fields.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::numeric::{FieldDescriptor, FieldElem, PrimeField};
use crate::poly::{witt_vars, IntPoly, Vars};
use crate::report::Report;
use crate::Caps;

/// Environment variable naming the on-disk law cache directory.
pub const CACHE_ENV: &str = "DIEUDONNE_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LawKind {
    Add,
    Mul,
    Neg,
}

impl LawKind {
    pub fn name(self) -> &'static str {
        match self {
            LawKind::Add => "add",
            LawKind::Mul => "mul",
            LawKind::Neg => "neg",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "add" => Ok(LawKind::Add),
            "mul" => Ok(LawKind::Mul),
            "neg" => Ok(LawKind::Neg),
            _ => Err(Error::Parse(format!("unknown law kind {s:?}"))),
        }
    }

    fn blocks(self) -> &'static [&'static str] {
        match self {
            LawKind::Neg => &["x"],
            _ => &["x", "y"],
        }
    }
}

/// `w_n = Σ_{i ≤ n} p^i x_i^{p^{n-i}}` in the variables `x0..xn`.
pub fn ghost_poly(p: u32, n: u32) -> IntPoly {
    let v = witt_vars(&["x"], n);
    ghost_in(p, n, &v, 0)
}

/// `w_n` of the variable block starting at `offset` inside `vars`.
fn ghost_in(p: u32, n: u32, vars: &Vars, offset: usize) -> IntPoly {
    let mut w = IntPoly::zero(vars);
    for i in 0..=n {
        let mut e = vec![0; vars.len()];
        e[offset + i as usize] = p.pow(n - i);
        w = w.add(&IntPoly::monomial(vars, e, BigInt::from(p).pow(i)));
    }
    w
}

/// The polynomials `[f_0, …, f_n]` of one law; `f_i` lives in the variables
/// `x0..xi, y0..yi` (negation: `x0..xi`).
#[derive(Debug, Clone, PartialEq)]
pub struct WittLaw {
    pub p: u32,
    pub n: u32,
    pub kind: LawKind,
    all: Arc<Vec<IntPoly>>,
}

impl WittLaw {
    pub fn from_polys(p: u32, kind: LawKind, polys: Vec<IntPoly>) -> Self {
        WittLaw {
            p,
            n: polys.len() as u32 - 1,
            kind,
            all: Arc::new(polys),
        }
    }

    /// `[f_0, …, f_n]`.
    pub fn polys(&self) -> &[IntPoly] {
        &self.all[..=self.n as usize]
    }

    /// `f_i` moved into the variables of level `n`, blocks `x0..xn, y0..yn`.
    pub fn poly_at_level(&self, i: u32, n: u32) -> IntPoly {
        let target = witt_vars(self.kind.blocks(), n);
        let map: Vec<usize> = (0..self.kind.blocks().len())
            .flat_map(|b| (0..=i).map(move |j| b * (n as usize + 1) + j as usize))
            .collect();
        self.all[i as usize].embed(&target, &map)
    }

    /// Weights `p^i` for `x_i`, `y_i`, used for display and homogeneity.
    pub fn weights(p: u32, i: u32, blocks: usize) -> Vec<u64> {
        (0..blocks)
            .flat_map(|_| (0..=i).map(|j| (p as u64).pow(j)))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "n": self.n,
            "kind": self.kind.name(),
            "polys": self.polys().iter().map(IntPoly::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn format_text(&self) -> String {
        let name = match self.kind {
            LawKind::Add => "phi",
            LawKind::Mul => "psi",
            LawKind::Neg => "iota",
        };
        let blocks = self.kind.blocks().len();
        self.polys()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let w = Self::weights(self.p, i as u32, blocks);
                format!("{name}_{i} = {}", f.format_weighted(&w))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

type LawMemo = Mutex<HashMap<(u32, LawKind), Arc<Vec<IntPoly>>>>;

fn memo() -> &'static LawMemo {
    static MEMO: OnceLock<LawMemo> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The cache directory from `DIEUDONNE_CACHE`, if set.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

fn cache_path(dir: &Path, p: u32, kind: LawKind, i: u32) -> PathBuf {
    dir.join(format!("witt-{}-p{p}-{i}.json", kind.name()))
}

fn read_cached(dir: &Path, p: u32, kind: LawKind, n: u32) -> Option<Vec<IntPoly>> {
    (0..=n)
        .map(|i| {
            let text = std::fs::read_to_string(cache_path(dir, p, kind, i)).ok()?;
            let v: serde_json::Value = serde_json::from_str(&text).ok()?;
            let f = IntPoly::from_json(&v).ok()?;
            (f.vars().as_slice() == witt_vars(kind.blocks(), i).as_slice()).then_some(f)
        })
        .collect()
}

/// Writes each polynomial to a temporary file and renames it into place, so
/// concurrent readers never observe a partial file.
fn write_cached(dir: &Path, p: u32, kind: LawKind, polys: &[IntPoly]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (i, f) in polys.iter().enumerate() {
        let target = cache_path(dir, p, kind, i as u32);
        if target.exists() {
            continue;
        }
        let tmp = dir.join(format!(
            ".{}.{}.tmp",
            target.file_name().unwrap().to_string_lossy(),
            std::process::id()
        ));
        std::fs::write(&tmp, serde_json::to_string(&f.to_json())?)?;
        std::fs::rename(&tmp, &target)?;
    }
    Ok(())
}

/// Solves the ghost recursion for levels `0..=n`, on packed monomials with
/// `i128` coefficients when they fit and on [`IntPoly`] otherwise.
fn generate(p: u32, n: u32, kind: LawKind) -> Result<Vec<IntPoly>> {
    if let Some(out) = packed::generate(p, n, kind)? {
        return Ok(out);
    }
    generate_big(p, n, kind)
}

fn generate_big(p: u32, n: u32, kind: LawKind) -> Result<Vec<IntPoly>> {
    let blocks = kind.blocks();
    let vars = witt_vars(blocks, n);
    let stride = n as usize + 1;
    let pb = BigInt::from(p);
    // pw[i] holds f_i^{p^{k-i}} at the current level k
    let mut pw: Vec<IntPoly> = Vec::new();
    let mut out = Vec::new();
    for k in 0..=n {
        for f in pw.iter_mut() {
            *f = f.pow(p);
        }
        let gx = ghost_in(p, k, &vars, 0);
        let mut num = match kind {
            LawKind::Add => gx.add(&ghost_in(p, k, &vars, stride)),
            LawKind::Mul => gx.mul(&ghost_in(p, k, &vars, stride)),
            LawKind::Neg => gx.neg(),
        };
        for (i, f) in pw.iter().enumerate() {
            num = num.sub(&f.scale(&pb.pow(i as u32)));
        }
        let fk = num.div_exact(&pb.pow(k)).ok_or_else(|| integrality(p, k, kind))?;
        pw.push(fk.clone());
        out.push(restrict(&fk, blocks.len(), stride, k));
    }
    Ok(out)
}

fn integrality(p: u32, k: u32, kind: LawKind) -> Error {
    Error::Integrality(format!(
        "{} law at p={p}, level {k} has a non-integral coefficient",
        kind.name()
    ))
}

/// Moves a polynomial in the level-`n` blocks (`stride = n + 1`) to the
/// variables of level `k`.
fn restrict(f: &IntPoly, blocks: usize, stride: usize, k: u32) -> IntPoly {
    let names = ["x", "y"];
    let target = witt_vars(&names[..blocks], k);
    let terms = f.terms().map(|(e, c)| {
        let mut ne = Vec::with_capacity(target.len());
        for b in 0..blocks {
            ne.extend_from_slice(&e[b * stride..b * stride + k as usize + 1]);
        }
        (ne, c.clone())
    });
    IntPoly::from_terms(&target, terms)
}

mod packed {
    //! Polynomials with monomials packed into a `u128` and `i128`
    //! coefficients; every operation reports overflow instead of wrapping.

    use std::collections::HashMap;
    use std::hash::{BuildHasherDefault, Hasher};

    use num_bigint::BigInt;

    use super::{integrality, restrict, witt_vars, IntPoly, LawKind};
    use crate::error::Result;

    #[derive(Default)]
    pub(super) struct MixHasher(u64);

    impl Hasher for MixHasher {
        fn finish(&self) -> u64 {
            self.0
        }
        fn write(&mut self, bytes: &[u8]) {
            for &b in bytes {
                self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
            }
        }
        fn write_u128(&mut self, v: u128) {
            let x = (v as u64) ^ ((v >> 64) as u64).rotate_left(29);
            self.0 = (x ^ (x >> 31)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }

    /// Fixed-width coefficient type with overflow-checked arithmetic.
    pub(super) trait Int: Copy + Eq + std::fmt::Debug + Into<BigInt> {
        const ZERO: Self;
        const ONE: Self;
        fn from_u32(v: u32) -> Self;
        fn add(self, o: Self) -> Option<Self>;
        fn mul(self, o: Self) -> Option<Self>;
        fn neg(self) -> Option<Self>;
        fn pow(self, e: u32) -> Option<Self>;
        fn rem_is_zero(self, d: Self) -> bool;
        fn div(self, d: Self) -> Self;
    }

    macro_rules! int_impl {
        ($t:ty) => {
            impl Int for $t {
                const ZERO: Self = 0;
                const ONE: Self = 1;
                fn from_u32(v: u32) -> Self {
                    v as $t
                }
                fn add(self, o: Self) -> Option<Self> {
                    self.checked_add(o)
                }
                fn mul(self, o: Self) -> Option<Self> {
                    self.checked_mul(o)
                }
                fn neg(self) -> Option<Self> {
                    self.checked_neg()
                }
                fn pow(self, e: u32) -> Option<Self> {
                    self.checked_pow(e)
                }
                fn rem_is_zero(self, d: Self) -> bool {
                    self % d == 0
                }
                fn div(self, d: Self) -> Self {
                    self / d
                }
            }
        };
    }
    int_impl!(i64);
    int_impl!(i128);

    type Map<I> = HashMap<u128, I, BuildHasherDefault<MixHasher>>;
    type Terms<I> = Vec<(u128, I)>;

    struct Layout {
        bits: u32,
        nvars: usize,
        /// Variables of weight one; their total degree buckets the products.
        key_vars: Vec<usize>,
    }

    impl Layout {
        fn unpack(&self, m: u128) -> Vec<u32> {
            let mask = (1u128 << self.bits) - 1;
            (0..self.nvars)
                .map(|i| ((m >> (i as u32 * self.bits)) & mask) as u32)
                .collect()
        }

        fn var_pow(&self, i: usize, e: u32) -> u128 {
            (e as u128) << (i as u32 * self.bits)
        }

        fn key(&self, m: u128) -> usize {
            let mask = (1u128 << self.bits) - 1;
            self.key_vars
                .iter()
                .map(|&i| ((m >> (i as u32 * self.bits)) & mask) as usize)
                .sum()
        }

        fn buckets<I: Int>(&self, a: &Terms<I>) -> Vec<Terms<I>> {
            let mut out: Vec<Terms<I>> = Vec::new();
            for &(m, c) in a {
                let k = self.key(m);
                if out.len() <= k {
                    out.resize_with(k + 1, Vec::new);
                }
                out[k].push((m, c));
            }
            out
        }
    }

    fn add_into<I: Int>(acc: &mut Map<I>, m: u128, c: I) -> Option<()> {
        let e = acc.entry(m).or_insert(I::ZERO);
        *e = e.add(c)?;
        Some(())
    }

    fn flush<I: Int>(acc: &mut Map<I>, out: &mut Terms<I>) {
        out.extend(acc.drain().filter(|(_, c)| *c != I::ZERO));
    }

    /// Products grouped by the degree in the weight-one variables, so the
    /// accumulator for each group stays small.
    fn mul<I: Int>(l: &Layout, a: &Terms<I>, b: &Terms<I>) -> Option<Terms<I>> {
        let (ba, bb) = (l.buckets(a), l.buckets(b));
        if ba.is_empty() || bb.is_empty() {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        let mut acc = Map::<I>::default();
        for s in 0..ba.len() + bb.len() - 1 {
            for ka in s.saturating_sub(bb.len() - 1)..=s.min(ba.len() - 1) {
                for &(ma, ca) in &ba[ka] {
                    for &(mb, cb) in &bb[s - ka] {
                        add_into(&mut acc, ma + mb, ca.mul(cb)?)?;
                    }
                }
            }
            flush(&mut acc, &mut out);
        }
        Some(out)
    }

    fn square<I: Int>(l: &Layout, a: &Terms<I>) -> Option<Terms<I>> {
        let ba = l.buckets(a);
        if ba.is_empty() {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        let mut acc = Map::<I>::default();
        for s in 0..2 * ba.len() - 1 {
            for ka in s.saturating_sub(ba.len() - 1)..=s / 2 {
                let kb = s - ka;
                if ka == kb {
                    let t = &ba[ka];
                    for (i, &(mi, ci)) in t.iter().enumerate() {
                        add_into(&mut acc, mi + mi, ci.mul(ci)?)?;
                        let twice = ci.mul(I::from_u32(2))?;
                        for &(mj, cj) in &t[i + 1..] {
                            add_into(&mut acc, mi + mj, twice.mul(cj)?)?;
                        }
                    }
                } else {
                    for &(mi, ci) in &ba[ka] {
                        let twice = ci.mul(I::from_u32(2))?;
                        for &(mj, cj) in &ba[kb] {
                            add_into(&mut acc, mi + mj, twice.mul(cj)?)?;
                        }
                    }
                }
            }
            flush(&mut acc, &mut out);
        }
        Some(out)
    }

    fn pow<I: Int>(l: &Layout, a: &Terms<I>, mut e: u32) -> Option<Terms<I>> {
        let mut base = a.clone();
        let mut acc: Option<Terms<I>> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(x) => mul(l, &x, &base)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = square(l, &base)?;
            }
        }
        Some(acc.unwrap_or_else(|| vec![(0, I::ONE)]))
    }

    fn ghost<I: Int>(l: &Layout, p: u32, k: u32, offset: usize) -> Option<Terms<I>> {
        (0..=k)
            .map(|i| Some((l.var_pow(offset + i as usize, p.pow(k - i)), I::from_u32(p).pow(i)?)))
            .collect()
    }

    /// `None` when the packed representation cannot hold the computation.
    pub(super) fn generate(p: u32, n: u32, kind: LawKind) -> Result<Option<Vec<IntPoly>>> {
        let blocks = kind.blocks().len();
        let stride = n as usize + 1;
        let nvars = blocks * stride;
        let top = (p as u64).pow(n);
        let bits = 64 - top.leading_zeros() + 1;
        if bits as usize * nvars > 128 {
            return Ok(None);
        }
        let l = Layout {
            bits,
            nvars,
            key_vars: (0..blocks).map(|b| b * stride).collect(),
        };
        let attempt = match run::<i64>(&l, p, n, kind, blocks, stride) {
            None => run::<i128>(&l, p, n, kind, blocks, stride),
            found => found,
        };
        attempt.transpose()
    }

    fn run<I: Int>(l: &Layout, p: u32, n: u32, kind: LawKind, blocks: usize, stride: usize) -> Option<Result<Vec<IntPoly>>> {
        let vars = witt_vars(&["x", "y"][..blocks], n);
        let mut pw: Vec<Terms<I>> = Vec::new();
        let mut out = Vec::new();
        for k in 0..=n {
            for f in pw.iter_mut() {
                *f = pow(l, f, p)?;
            }
            let gx = ghost(l, p, k, 0)?;
            let lead: Terms<I> = match kind {
                LawKind::Add => gx.into_iter().chain(ghost(l, p, k, stride)?).collect(),
                LawKind::Mul => mul(l, &gx, &ghost(l, p, k, stride)?)?,
                LawKind::Neg => gx.into_iter().map(|(m, c)| Some((m, c.neg()?))).collect::<Option<_>>()?,
            };
            let mut num = Map::<I>::default();
            for (m, c) in lead {
                add_into(&mut num, m, c)?;
            }
            for (i, f) in pw.iter().enumerate() {
                let s = I::from_u32(p).pow(i as u32)?;
                for &(m, c) in f {
                    add_into(&mut num, m, c.mul(s)?.neg()?)?;
                }
            }
            let d = I::from_u32(p).pow(k)?;
            let mut fk = Vec::with_capacity(num.len());
            for (m, c) in num {
                if c == I::ZERO {
                    continue;
                }
                if !c.rem_is_zero(d) {
                    return Some(Err(integrality(p, k, kind)));
                }
                fk.push((m, c.div(d)));
            }
            let big = IntPoly::from_terms(&vars, fk.iter().map(|&(m, c)| (l.unpack(m), c.into())));
            out.push(restrict(&big, blocks, stride, k));
            pw.push(fk);
        }
        Some(Ok(out))
    }
}

/// The law of the given kind at level `n`, generated once per process and
/// optionally persisted in `cache`.
pub fn law_with_cache(p: u32, n: u32, kind: LawKind, caps: &Caps, cache: Option<&Path>) -> Result<WittLaw> {
    PrimeField::new(p)?;
    let cap = caps.witt_level_cap(p);
    if n > cap {
        return Err(Error::cap(format!("Witt level for p={p}"), n as u64, cap as u64));
    }
    let key = (p, kind);
    if let Some(found) = memo().lock().unwrap().get(&key) {
        if found.len() > n as usize {
            return Ok(WittLaw {
                p,
                n,
                kind,
                all: found.clone(),
            });
        }
    }
    let polys = match cache.and_then(|d| read_cached(d, p, kind, n)) {
        Some(polys) => polys,
        None => {
            let polys = generate(p, n, kind)?;
            if let Some(dir) = cache {
                write_cached(dir, p, kind, &polys)?;
            }
            polys
        }
    };
    let all = Arc::new(polys);
    let mut m = memo().lock().unwrap();
    let entry = m.entry(key).or_insert_with(|| all.clone());
    if entry.len() < all.len() {
        *entry = all.clone();
    }
    Ok(WittLaw { p, n, kind, all })
}

pub fn law(p: u32, n: u32, kind: LawKind, caps: &Caps) -> Result<WittLaw> {
    law_with_cache(p, n, kind, caps, cache_dir_from_env().as_deref())
}

pub fn addition_law(p: u32, n: u32) -> Result<WittLaw> {
    law(p, n, LawKind::Add, &Caps::default())
}

pub fn multiplication_law(p: u32, n: u32) -> Result<WittLaw> {
    law(p, n, LawKind::Mul, &Caps::default())
}

pub fn negation_law(p: u32, n: u32) -> Result<WittLaw> {
    law(p, n, LawKind::Neg, &Caps::default())
}

/// Checks `w_i(f_0, …, f_i)` against `w_i(X) ± w_i(Y)` (or `·`, or `-w_i(X)`)
/// as exact polynomial identities.
pub fn check_ghost_identity(law: &WittLaw) -> Report {
    let params = json!({ "p": law.p, "n": law.n, "kind": law.kind.name() });
    let blocks = law.kind.blocks();
    let pb = BigInt::from(law.p);
    for i in 0..=law.n {
        let vars = witt_vars(blocks, i);
        let stride = i as usize + 1;
        let mut lhs = IntPoly::zero(&vars);
        for j in 0..=i {
            let fj = law.poly_at_level(j, i);
            lhs = lhs.add(&fj.pow(law.p.pow(i - j)).scale(&pb.pow(j)));
        }
        let gx = ghost_in(law.p, i, &vars, 0);
        let rhs = match law.kind {
            LawKind::Add => gx.add(&ghost_in(law.p, i, &vars, stride)),
            LawKind::Mul => gx.mul(&ghost_in(law.p, i, &vars, stride)),
            LawKind::Neg => gx.neg(),
        };
        if lhs != rhs {
            return Report::fail("ghost_identity", params, format!("level {i}"));
        }
        if law.polys()[i as usize].terms().any(|(_, c)| c.is_zero()) {
            return Report::fail("ghost_identity", params, format!("stored zero at level {i}"));
        }
    }
    Report::pass("ghost_identity", params)
}

/// Every monomial `Π x_j^{m_j} y_j^{m'_j}` of `f_i` has `Σ (m_j + m'_j) p^j = p^i`
/// (for multiplication: the `x` part and the `y` part each have weight `p^i`).
pub fn check_homogeneity(law: &WittLaw) -> Report {
    let params = json!({ "p": law.p, "n": law.n, "kind": law.kind.name() });
    for (i, f) in law.polys().iter().enumerate() {
        if let Some(bad) = homogeneity_violation(law.p, i as u32, law.kind, f) {
            return Report::fail("homogeneity", params, format!("level {i}: monomial {bad}"));
        }
    }
    Report::pass("homogeneity", params)
}

/// The first monomial of `f` (a level-`i` law polynomial) of the wrong weight.
pub fn homogeneity_violation(p: u32, i: u32, kind: LawKind, f: &IntPoly) -> Option<String> {
    let stride = i as usize + 1;
    let target = (p as u64).pow(i);
    let w = |e: &[u32]| -> u64 {
        e.iter()
            .enumerate()
            .map(|(j, &k)| k as u64 * (p as u64).pow((j % stride) as u32))
            .sum()
    };
    for (e, c) in f.terms() {
        let ok = match kind {
            LawKind::Mul => w(&e[..stride]) == target && w(&e[stride..]) == target,
            _ => w(e) == target,
        };
        if !ok {
            return Some(IntPoly::monomial(f.vars(), e.clone(), c.clone()).to_string());
        }
    }
    None
}

/// A law polynomial reduced mod `p` with exponents collapsed by `a^p = a`,
/// for fast evaluation on `F_p`. Variables occurring only as bare linear
/// terms are split off; the rest is tabulated once it has been evaluated
/// often enough to pay for the table.
#[derive(Debug)]
struct PrimeEval {
    p: u32,
    linear: Vec<(usize, u32)>,
    core_vars: Vec<usize>,
    terms: Vec<(u32, Vec<(usize, u32)>)>,
    calls: AtomicU64,
    table: OnceLock<Vec<u32>>,
}

const TABLE_LIMIT: u64 = 1 << 17;

impl PrimeEval {
    fn new(f: &IntPoly, p: u32) -> Self {
        let fp = PrimeField::unchecked(p);
        let mut acc: HashMap<Vec<(usize, u32)>, u32> = HashMap::new();
        for (e, c) in f.terms() {
            let c = fp.from_bigint(c);
            if c == 0 {
                continue;
            }
            let mono: Vec<(usize, u32)> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| (v, 1 + (k - 1) % (p - 1)))
                .collect();
            let slot = acc.entry(mono).or_insert(0);
            *slot = fp.add(*slot, c);
        }
        let mut all: Vec<(u32, Vec<(usize, u32)>)> =
            acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (c, m)).collect();
        all.sort();
        let mut uses: HashMap<usize, usize> = HashMap::new();
        for (_, m) in &all {
            for &(v, _) in m {
                *uses.entry(v).or_insert(0) += 1;
            }
        }
        let mut linear = Vec::new();
        let mut terms = Vec::new();
        for (c, m) in all {
            if m.len() == 1 && m[0].1 == 1 && uses[&m[0].0] == 1 {
                linear.push((m[0].0, c));
            } else {
                terms.push((c, m));
            }
        }
        let mut core_vars: Vec<usize> = terms.iter().flat_map(|(_, m)| m.iter().map(|&(v, _)| v)).collect();
        core_vars.sort();
        core_vars.dedup();
        // re-index core terms by position in core_vars
        let terms = terms
            .into_iter()
            .map(|(c, m)| {
                let m = m
                    .into_iter()
                    .map(|(v, k)| (core_vars.binary_search(&v).unwrap(), k))
                    .collect();
                (c, m)
            })
            .collect();
        PrimeEval {
            p,
            linear,
            core_vars,
            terms,
            calls: AtomicU64::new(0),
            table: OnceLock::new(),
        }
    }

    fn table_size(&self) -> Option<u64> {
        (self.p as u64)
            .checked_pow(self.core_vars.len() as u32)
            .filter(|&s| s <= TABLE_LIMIT)
    }

    fn eval_core(&self, core: &[u32]) -> u32 {
        let p = self.p as u64;
        let mut acc = 0u64;
        for (c, mono) in &self.terms {
            let mut t = *c as u64;
            for &(v, k) in mono {
                let x = core[v] as u64;
                let (mut base, mut e, mut pw) = (x, k, 1u64);
                while e > 0 {
                    if e & 1 == 1 {
                        pw = pw * base % p;
                    }
                    base = base * base % p;
                    e >>= 1;
                }
                t = t * pw % p;
                if t == 0 {
                    break;
                }
            }
            acc += t;
        }
        (acc % p) as u32
    }

    fn core_index(&self, core: &[u32]) -> usize {
        core.iter().rev().fold(0usize, |acc, &x| acc * self.p as usize + x as usize)
    }

    fn eval(&self, vals: &[u32]) -> u32 {
        let p = self.p as u64;
        let mut acc: u64 = self.linear.iter().map(|&(v, c)| c as u64 * vals[v] as u64 % p).sum();
        let core: Vec<u32> = self.core_vars.iter().map(|&v| vals[v]).collect();
        let core_val = match self.table_size() {
            Some(size) => {
                let calls = self.calls.fetch_add(1, Ordering::Relaxed);
                if self.table.get().is_some() || calls > size / 8 {
                    let t = self.table.get_or_init(|| {
                        let mut t = Vec::with_capacity(size as usize);
                        let mut point = vec![0u32; self.core_vars.len()];
                        for mut idx in 0..size {
                            for slot in point.iter_mut() {
                                *slot = (idx % p) as u32;
                                idx /= p;
                            }
                            t.push(self.eval_core(&point));
                        }
                        t
                    });
                    t[self.core_index(&core)]
                } else {
                    self.eval_core(&core)
                }
            }
            None => self.eval_core(&core),
        };
        acc += core_val as u64;
        (acc % p) as u32
    }
}

type EvalMemo = Mutex<HashMap<(u32, LawKind, u32), Arc<PrimeEval>>>;

fn prime_eval(p: u32, kind: LawKind, i: u32) -> Result<Arc<PrimeEval>> {
    static MEMO: OnceLock<EvalMemo> = OnceLock::new();
    let m = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(e) = m.lock().unwrap().get(&(p, kind, i)) {
        return Ok(e.clone());
    }
    let l = law(p, i, kind, &Caps::default())?;
    let e = Arc::new(PrimeEval::new(&l.polys()[i as usize], p));
    m.lock().unwrap().insert((p, kind, i), e.clone());
    Ok(e)
}

/// A Witt vector `(a_0, …, a_n)` of `W_n(k)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WittVector {
    comps: Vec<FieldElem>,
}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl WittVector {
    pub fn new(comps: Vec<FieldElem>) -> Result<Self> {
        let first = comps
            .first()
            .ok_or_else(|| Error::InvalidArgument("a Witt vector needs a component".into()))?;
        let desc = first.descriptor().clone();
        if comps.iter().any(|c| **c.descriptor() != *desc) {
            return Err(Error::FieldMismatch("components over different fields".into()));
        }
        Ok(WittVector { comps })
    }

    pub fn from_prime(p: u32, comps: &[u32]) -> Result<Self> {
        let desc = FieldDescriptor::prime(p)?;
        Self::new(comps.iter().map(|&a| FieldElem::from_int(&desc, a as i64)).collect())
    }

    pub fn zero(desc: &Arc<FieldDescriptor>, n: u32) -> Self {
        WittVector {
            comps: vec![FieldElem::zero(desc); n as usize + 1],
        }
    }

    pub fn one(desc: &Arc<FieldDescriptor>, n: u32) -> Self {
        teichmuller(&FieldElem::one(desc), n)
    }

    /// All `q^{n+1}` vectors of `W_n(F_q)`.
    pub fn all(desc: &Arc<FieldDescriptor>, n: u32) -> Vec<WittVector> {
        let els = FieldElem::all(desc);
        let q = els.len();
        let count = q.pow(n + 1);
        (0..count)
            .map(|mut idx| {
                let mut comps = Vec::with_capacity(n as usize + 1);
                for _ in 0..=n {
                    comps.push(els[idx % q].clone());
                    idx /= q;
                }
                WittVector { comps }
            })
            .collect()
    }

    pub fn level(&self) -> u32 {
        self.comps.len() as u32 - 1
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        self.comps[0].descriptor()
    }

    pub fn components(&self) -> &[FieldElem] {
        &self.comps
    }

    /// Components as residues, for vectors over a prime field.
    pub fn prime_components(&self) -> Option<Vec<u32>> {
        self.comps.iter().map(|c| c.as_prime()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &WittVector) -> Result<()> {
        if self.level() != other.level() {
            return Err(Error::InvalidArgument(format!(
                "level mismatch: {} vs {}",
                self.level(),
                other.level()
            )));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field(), other.field())));
        }
        Ok(())
    }

    fn apply(&self, other: Option<&WittVector>, kind: LawKind) -> Result<WittVector> {
        if let Some(o) = other {
            self.check(o)?;
        }
        let n = self.level();
        let desc = self.field().clone();
        let p = desc.p();
        if desc.degree() == 1 {
            let mut vals: Vec<u32> = Vec::with_capacity(2 * n as usize + 2);
            let mut comps = Vec::with_capacity(n as usize + 1);
            for i in 0..=n {
                vals.clear();
                vals.extend(self.comps[..=i as usize].iter().map(|c| c.coeffs()[0]));
                if let Some(o) = other {
                    vals.extend(o.comps[..=i as usize].iter().map(|c| c.coeffs()[0]));
                }
                let e = prime_eval(p, kind, i)?;
                comps.push(FieldElem::from_int(&desc, e.eval(&vals) as i64));
            }
            return Ok(WittVector { comps });
        }
        let l = law(p, n, kind, &Caps::default())?;
        let zero = FieldElem::zero(&desc);
        let one = FieldElem::one(&desc);
        let fp = desc.prime_field();
        let comps = (0..=n)
            .map(|i| {
                let mut vals: Vec<FieldElem> = self.comps[..=i as usize].to_vec();
                if let Some(o) = other {
                    vals.extend_from_slice(&o.comps[..=i as usize]);
                }
                l.polys()[i as usize].eval(
                    &vals,
                    &one,
                    |c| FieldElem::from_int(&desc, fp.from_bigint(c) as i64),
                    |a, b| a.add_unchecked(b),
                    |a, b| a.mul_unchecked(b),
                    &zero,
                )
            })
            .collect();
        Ok(WittVector { comps })
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.apply(Some(other), LawKind::Add)
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector> {
        self.apply(Some(other), LawKind::Mul)
    }

    pub fn neg(&self) -> Result<WittVector> {
        self.apply(None, LawKind::Neg)
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector> {
        self.add(&other.neg()?)
    }

    /// `V(a_0, …, a_n) = (0, a_0, …, a_{n-1})`.
    pub fn verschiebung(&self) -> WittVector {
        let mut comps = vec![FieldElem::zero(self.field())];
        comps.extend_from_slice(&self.comps[..self.comps.len() - 1]);
        WittVector { comps }
    }

    /// `σ(a_0, …, a_n) = (a_0^p, …, a_n^p)`.
    pub fn sigma(&self) -> WittVector {
        WittVector {
            comps: self.comps.iter().map(FieldElem::frobenius).collect(),
        }
    }

    /// The vector truncated to level `m ≤ n`.
    pub fn truncate(&self, m: u32) -> WittVector {
        WittVector {
            comps: self.comps[..=m as usize].to_vec(),
        }
    }

    /// `Σ p^i τ(a_i)` in `Z/p^{n+1}`, for vectors over `F_p`.
    pub fn to_residue(&self) -> Result<u64> {
        let p = self.field().p() as u64;
        let digits = self
            .prime_components()
            .ok_or_else(|| Error::Unsupported("residues are defined over prime fields only".into()))?;
        let n = self.level();
        let modulus = p.pow(n + 1);
        let mut acc = 0u64;
        for (i, &a) in digits.iter().enumerate() {
            acc = (acc + p.pow(i as u32) * teichmuller_residue(a as u64, p, n)) % modulus;
        }
        Ok(acc)
    }

    /// The inverse of [`to_residue`](Self::to_residue).
    pub fn from_residue(p: u32, n: u32, r: u64) -> Result<WittVector> {
        let desc = FieldDescriptor::prime(p)?;
        let pp = p as u64;
        let modulus = pp.pow(n + 1);
        let mut rem = r % modulus;
        let mut comps = Vec::with_capacity(n as usize + 1);
        for i in 0..=n {
            let unit = pp.pow(i);
            let a = (rem / unit) % pp;
            comps.push(FieldElem::from_int(&desc, a as i64));
            let t = unit * teichmuller_residue(a, pp, n) % modulus;
            rem = (rem + modulus - t) % modulus;
        }
        debug_assert_eq!(rem, 0);
        Ok(WittVector { comps })
    }

    /// The integer `c` as an element of `W_n(F_p)`.
    pub fn from_integer(p: u32, n: u32, c: &BigInt) -> Result<WittVector> {
        let m = BigInt::from(p).pow(n + 1);
        let r = ((c % &m) + &m) % &m;
        Self::from_residue(p, n, r.to_u64().expect("residue fits"))
    }
}

/// `τ(a) = a^{p^n} mod p^{n+1}`, the Teichmüller representative of `a`.
fn teichmuller_residue(a: u64, p: u64, n: u32) -> u64 {
    let modulus = p.pow(n + 1);
    let mut t = a % modulus;
    for _ in 0..n {
        let mut r = 1u64;
        for _ in 0..p {
            r = r * t % modulus;
        }
        t = r;
    }
    t
}

/// `τ(a) = (a, 0, …, 0)`.
pub fn teichmuller(a: &FieldElem, n: u32) -> WittVector {
    let mut comps = vec![FieldElem::zero(a.descriptor()); n as usize + 1];
    comps[0] = a.clone();
    WittVector { comps }
}

/// The nonzero terms of an integer polynomial reduced mod `p`.
pub fn reduce_mod_p(f: &IntPoly, p: u32) -> Vec<(Vec<u32>, u32)> {
    let fp = PrimeField::unchecked(p);
    f.terms()
        .map(|(e, c)| (e.clone(), fp.from_bigint(c)))
        .filter(|(_, c)| *c != 0)
        .collect()
}

impl WittVector {
    /// `u + u + … + u` (`k` times).
    pub fn times(&self, k: u64) -> Result<WittVector> {
        let mut acc = WittVector::zero(self.field(), self.level());
        for _ in 0..k {
            acc = acc.add(self)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    fn parse_int_poly(vars: &Vars, terms: &[(i64, &[u32])]) -> IntPoly {
        IntPoly::from_terms(vars, terms.iter().map(|(c, e)| (e.to_vec(), BigInt::from(*c))))
    }

    #[test]
    fn ghost_examples() {
        assert_eq!(ghost_poly(2, 0).to_string(), "x0");
        let w = ghost_poly(2, 1);
        let v = witt_vars(&["x"], 1);
        assert_eq!(w, parse_int_poly(&v, &[(1, &[2, 0]), (2, &[0, 1])]));
        let w = ghost_poly(3, 2);
        let v = witt_vars(&["x"], 2);
        assert_eq!(w, parse_int_poly(&v, &[(1, &[9, 0, 0]), (3, &[0, 3, 0]), (9, &[0, 0, 1])]));
    }

    #[test]
    fn small_laws() {
        let add = addition_law(2, 1).unwrap();
        let v0 = witt_vars(&["x", "y"], 0);
        assert_eq!(add.polys()[0], parse_int_poly(&v0, &[(1, &[1, 0]), (1, &[0, 1])]));
        let v1 = witt_vars(&["x", "y"], 1);
        assert_eq!(
            add.polys()[1],
            parse_int_poly(&v1, &[(1, &[0, 1, 0, 0]), (1, &[0, 0, 0, 1]), (-1, &[1, 0, 1, 0])])
        );
        let mul = multiplication_law(2, 1).unwrap();
        assert_eq!(mul.polys()[0], parse_int_poly(&v0, &[(1, &[1, 1])]));
        assert_eq!(
            mul.polys()[1],
            parse_int_poly(&v1, &[(1, &[2, 0, 0, 1]), (1, &[0, 1, 2, 0]), (2, &[0, 1, 0, 1])])
        );
        let neg = negation_law(3, 0).unwrap();
        assert_eq!(neg.polys()[0].to_string(), "-x0");
    }

    #[test]
    fn text_format_orders_by_weight() {
        let add = addition_law(2, 1).unwrap();
        assert_eq!(add.format_text(), "phi_0 = x0 + y0\nphi_1 = x1 + y1 - x0·y0");
    }

    #[test]
    fn homogeneity_negative_control() {
        let add = addition_law(2, 1).unwrap();
        let v1 = witt_vars(&["x", "y"], 1);
        let mut polys = add.polys().to_vec();
        polys[1] = polys[1].add(&IntPoly::var(&v1, 0));
        let bad = WittLaw::from_polys(2, LawKind::Add, polys);
        let r = check_homogeneity(&bad);
        assert!(!r.pass);
        assert!(r.counterexample.unwrap().contains("x0"));
        assert!(check_homogeneity(&add).pass);
    }

    #[test]
    fn level_cap_refuses() {
        let err = law(2, 99, LawKind::Add, &Caps::default()).unwrap_err();
        assert!(err.is_cap());
    }

    #[test]
    fn witt_vector_examples() {
        let one = WittVector::from_prime(2, &[1, 0, 0]).unwrap();
        assert_eq!(one.add(&one).unwrap(), WittVector::from_prime(2, &[0, 1, 0]).unwrap());
        let u = WittVector::from_prime(3, &[1, 0]).unwrap();
        assert_eq!(u.mul(&u).unwrap(), u);
        let v = WittVector::from_prime(2, &[1, 1, 0]).unwrap();
        assert_eq!(v.verschiebung(), WittVector::from_prime(2, &[0, 1, 1]).unwrap());
        assert_eq!(WittVector::from_prime(2, &[0, 1, 0]).unwrap().to_residue().unwrap(), 2);
        assert_eq!(WittVector::from_prime(2, &[1, 1, 1]).unwrap().to_residue().unwrap(), 7);
    }

    #[test]
    fn negation_cancels_exhaustively() {
        for (p, n) in [(2, 1), (2, 3), (3, 2), (5, 1)] {
            let desc = FieldDescriptor::prime(p).unwrap();
            let zero = WittVector::zero(&desc, n);
            for u in WittVector::all(&desc, n) {
                assert_eq!(u.add(&u.neg().unwrap()).unwrap(), zero, "p={p} n={n} u={u}");
            }
        }
    }

    #[test]
    fn residue_round_trip() {
        for (p, n) in [(2u32, 4u32), (3, 3), (5, 2), (7, 1)] {
            for r in 0..(p as u64).pow(n + 1) {
                let u = WittVector::from_residue(p, n, r).unwrap();
                assert_eq!(u.to_residue().unwrap(), r);
            }
        }
    }

    #[test]
    fn packed_generation_matches_bigint() {
        for (p, n) in [(2, 3), (3, 2), (5, 1)] {
            for kind in [LawKind::Add, LawKind::Mul, LawKind::Neg] {
                let fast = packed::generate(p, n, kind).unwrap().unwrap();
                assert_eq!(fast, generate_big(p, n, kind).unwrap(), "p={p} n={n} {kind:?}");
            }
        }
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let caps = Caps::default();
        let a = law_with_cache(3, 2, LawKind::Mul, &caps, Some(dir.path())).unwrap();
        assert!(cache_path(dir.path(), 3, LawKind::Mul, 2).exists());
        let cached = read_cached(dir.path(), 3, LawKind::Mul, 2).unwrap();
        assert_eq!(cached, a.polys());
    }
}
