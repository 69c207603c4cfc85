use std::collections::HashSet;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Generator index `G[i,j,k]` of the level-graded algebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenIndex {
    pub i: u16,
    pub j: u16,
    pub k: i32,
}

impl GenIndex {
    pub fn new(i: usize, j: usize, k: i32) -> Self {
        GenIndex {
            i: i as u16,
            j: j as u16,
            k,
        }
    }

    /// Canonical representative: `k > 0`, or `k = 0` with `i < j`.
    /// `None` stands for the constant `G[i,i,0] = 2`.
    pub fn canonical(self) -> Option<Self> {
        if self.k < 0 {
            return self.mirror().canonical();
        }
        if self.k == 0 {
            if self.i == self.j {
                return None;
            }
            if self.i > self.j {
                return Some(self.mirror());
            }
        }
        Some(self)
    }

    /// The same generator under `G^{(k)}_{ij} = G^{(-k)}_{ji}`.
    pub fn mirror(self) -> Self {
        GenIndex {
            i: self.j,
            j: self.i,
            k: -self.k,
        }
    }
}

impl fmt::Display for GenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G[{},{},{}]", self.i, self.j, self.k)
    }
}

/// A ring variable or abstract generator.
///
/// The derived order is the monomial order: shear variables first, then the
/// spectral and hole variables, free symbols by name, and generators last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `s_i = e^{Z_i/2}` for a pending edge.
    S(u16),
    /// `t_j = e^{Y_j/2}` for an inner edge.
    T(u16),
    Lam,
    /// `h = e^{P_h/2}`.
    H,
    Pi,
    Hbar,
    /// Free symbol, interned by name.
    Sym(&'static str),
    /// `Tr(H^k)` for k ≥ 1, an opaque central parameter.
    TrH(u32),
    G(GenIndex),
    Ghat(u16, u16),
}

fn interner() -> &'static Mutex<HashSet<&'static str>> {
    static TABLE: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashSet::new()))
}

impl Atom {
    /// Interned free symbol.
    pub fn sym(name: &str) -> Atom {
        let mut table = interner().lock().expect("symbol table poisoned");
        if let Some(s) = table.get(name) {
            return Atom::Sym(s);
        }
        let leaked: &'static str = Box::leak(name.to_string().into_boxed_str());
        table.insert(leaked);
        Atom::Sym(leaked)
    }

    pub fn g(i: usize, j: usize, k: i32) -> Atom {
        Atom::G(GenIndex::new(i, j, k))
    }

    pub fn ghat(i: usize, j: usize) -> Atom {
        Atom::Ghat(i as u16, j as u16)
    }

    /// True for abstract algebra generators (not differentiable variables).
    pub fn is_generator(&self) -> bool {
        matches!(self, Atom::G(_) | Atom::Ghat(..))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::S(i) => write!(f, "s{i}"),
            Atom::T(j) => write!(f, "t{j}"),
            Atom::Lam => write!(f, "lam"),
            Atom::H => write!(f, "h"),
            Atom::Pi => write!(f, "Pi"),
            Atom::Hbar => write!(f, "hbar"),
            Atom::Sym(s) => write!(f, "{s}"),
            Atom::TrH(k) => write!(f, "TrH[{k}]"),
            Atom::G(g) => write!(f, "{g}"),
            Atom::Ghat(i, j) => write!(f, "Ghat[{i},{j}]"),
        }
    }
}
