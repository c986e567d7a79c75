//! The gate registry.
//!
//! Every supported gate is one [`GateData`] entry in [`GATES`]. The parser,
//! both simulators and the test oracles all read from this table.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::tableau::Tableau;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateFlags {
    pub unitary: bool,
    pub collapsing: bool,
    pub noise: bool,
    pub annotation: bool,
}

const UNITARY: GateFlags = GateFlags {
    unitary: true,
    collapsing: false,
    noise: false,
    annotation: false,
};
const COLLAPSING: GateFlags = GateFlags {
    unitary: false,
    collapsing: true,
    noise: false,
    annotation: false,
};
const NOISE: GateFlags = GateFlags {
    unitary: false,
    collapsing: false,
    noise: true,
    annotation: false,
};
const ANNOTATION: GateFlags = GateFlags {
    unitary: false,
    collapsing: false,
    noise: false,
    annotation: true,
};

/// How a gate updates the x/z bit planes of a Pauli frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameRule {
    /// Pauli gates and the identity only change a frame's global phase.
    Nothing,
    /// Swap the x and z rows (H, √Y, √Y†).
    SwapXZ,
    /// `z ^= x` (S, S†).
    ZXorX,
    Cnot,
    Cy,
    Cz,
    Swap,
    Measure,
    Reset,
    MeasureReset,
    Noise,
    Annotation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    SDag,
    SqrtY,
    SqrtYDag,
    Cnot,
    Cy,
    Cz,
    Swap,
    M,
    R,
    Mr,
    XError,
    YError,
    ZError,
    Depolarize1,
    Depolarize2,
    Detector,
}

#[derive(Debug)]
pub struct GateData {
    pub gate: Gate,
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub flags: GateFlags,
    /// Targets consumed per application. DETECTOR takes any number of
    /// record targets and reports 1.
    pub arity: usize,
    pub parameter_count: usize,
    /// Images of X_0, X_1, ... then Z_0, Z_1, ... under conjugation.
    pub tableau_columns: Option<(&'static [&'static str], &'static [&'static str])>,
    /// Row-major matrix entries `(re, im)`; the first target is the least
    /// significant bit of the basis index.
    pub unitary: Option<&'static [(f64, f64)]>,
    /// For noise channels: with probability p, one of these Paulis is applied,
    /// chosen uniformly.
    pub noise_paulis: &'static [&'static str],
    pub frame_rule: FrameRule,
}

const H2: f64 = std::f64::consts::FRAC_1_SQRT_2;

const DEPOLARIZE2_PAULIS: [&str; 15] = [
    "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ",
];

macro_rules! unitary_gate {
    ($gate:ident, $name:expr, $aliases:expr, $arity:expr, $xs:expr, $zs:expr, $u:expr, $rule:ident) => {
        GateData {
            gate: Gate::$gate,
            name: $name,
            aliases: $aliases,
            flags: UNITARY,
            arity: $arity,
            parameter_count: 0,
            tableau_columns: Some((&$xs, &$zs)),
            unitary: Some(&$u),
            noise_paulis: &[],
            frame_rule: FrameRule::$rule,
        }
    };
}

macro_rules! other_gate {
    ($gate:ident, $name:expr, $flags:expr, $arity:expr, $params:expr, $paulis:expr, $rule:ident) => {
        GateData {
            gate: Gate::$gate,
            name: $name,
            aliases: &[],
            flags: $flags,
            arity: $arity,
            parameter_count: $params,
            tableau_columns: None,
            unitary: None,
            noise_paulis: &$paulis,
            frame_rule: FrameRule::$rule,
        }
    };
}

const O: (f64, f64) = (0.0, 0.0);
const ONE: (f64, f64) = (1.0, 0.0);
const NEG: (f64, f64) = (-1.0, 0.0);
const IM: (f64, f64) = (0.0, 1.0);
const NEG_IM: (f64, f64) = (0.0, -1.0);

pub static GATES: [GateData; 22] = [
    unitary_gate!(I, "I", &[], 1, ["+X"], ["+Z"], [ONE, O, O, ONE], Nothing),
    unitary_gate!(X, "X", &[], 1, ["+X"], ["-Z"], [O, ONE, ONE, O], Nothing),
    unitary_gate!(Y, "Y", &[], 1, ["-X"], ["-Z"], [O, NEG_IM, IM, O], Nothing),
    unitary_gate!(Z, "Z", &[], 1, ["-X"], ["+Z"], [ONE, O, O, NEG], Nothing),
    unitary_gate!(
        H,
        "H",
        &[],
        1,
        ["+Z"],
        ["+X"],
        [(H2, 0.0), (H2, 0.0), (H2, 0.0), (-H2, 0.0)],
        SwapXZ
    ),
    unitary_gate!(S, "S", &[], 1, ["+Y"], ["+Z"], [ONE, O, O, IM], ZXorX),
    unitary_gate!(SDag, "S_DAG", &[], 1, ["-Y"], ["+Z"], [ONE, O, O, NEG_IM], ZXorX),
    // H_YZ · S · H_YZ.
    unitary_gate!(
        SqrtY,
        "SQRT_Y",
        &[],
        1,
        ["-Z"],
        ["+X"],
        [(0.5, 0.5), (-0.5, -0.5), (0.5, 0.5), (0.5, 0.5)],
        SwapXZ
    ),
    unitary_gate!(
        SqrtYDag,
        "SQRT_Y_DAG",
        &[],
        1,
        ["+Z"],
        ["-X"],
        [(0.5, -0.5), (0.5, -0.5), (-0.5, 0.5), (0.5, -0.5)],
        SwapXZ
    ),
    unitary_gate!(
        Cnot,
        "CNOT",
        &["CX"],
        2,
        ["+XX", "+_X"],
        ["+Z_", "+ZZ"],
        [
            ONE, O, O, O, //
            O, O, O, ONE, //
            O, O, ONE, O, //
            O, ONE, O, O,
        ],
        Cnot
    ),
    unitary_gate!(
        Cy,
        "CY",
        &[],
        2,
        ["+XY", "+ZX"],
        ["+Z_", "+ZZ"],
        [
            ONE, O, O, O, //
            O, O, O, NEG_IM, //
            O, O, ONE, O, //
            O, IM, O, O,
        ],
        Cy
    ),
    unitary_gate!(
        Cz,
        "CZ",
        &[],
        2,
        ["+XZ", "+ZX"],
        ["+Z_", "+_Z"],
        [
            ONE, O, O, O, //
            O, ONE, O, O, //
            O, O, ONE, O, //
            O, O, O, NEG,
        ],
        Cz
    ),
    unitary_gate!(
        Swap,
        "SWAP",
        &[],
        2,
        ["+_X", "+X_"],
        ["+_Z", "+Z_"],
        [
            ONE, O, O, O, //
            O, O, ONE, O, //
            O, ONE, O, O, //
            O, O, O, ONE,
        ],
        Swap
    ),
    other_gate!(M, "M", COLLAPSING, 1, 0, [], Measure),
    other_gate!(R, "R", COLLAPSING, 1, 0, [], Reset),
    other_gate!(Mr, "MR", COLLAPSING, 1, 0, [], MeasureReset),
    other_gate!(XError, "X_ERROR", NOISE, 1, 1, ["X"], Noise),
    other_gate!(YError, "Y_ERROR", NOISE, 1, 1, ["Y"], Noise),
    other_gate!(ZError, "Z_ERROR", NOISE, 1, 1, ["Z"], Noise),
    other_gate!(Depolarize1, "DEPOLARIZE1", NOISE, 1, 1, ["X", "Y", "Z"], Noise),
    other_gate!(Depolarize2, "DEPOLARIZE2", NOISE, 2, 1, DEPOLARIZE2_PAULIS, Noise),
    other_gate!(Detector, "DETECTOR", ANNOTATION, 1, 0, [], Annotation),
];

struct Cache {
    tableaus: Vec<Option<Tableau>>,
    inverses: Vec<Option<Tableau>>,
}

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| {
        let tableaus: Vec<Option<Tableau>> = GATES
            .iter()
            .map(|g| {
                g.tableau_columns
                    .map(|(xs, zs)| Tableau::from_columns(xs, zs).expect("registry tableau"))
            })
            .collect();
        let inverses = tableaus
            .iter()
            .map(|t| t.as_ref().map(|t| t.inverse().expect("registry tableau inverse")))
            .collect();
        Cache { tableaus, inverses }
    })
}

impl Gate {
    pub fn data(self) -> &'static GateData {
        let d = &GATES[self as usize];
        debug_assert_eq!(d.gate, self);
        d
    }

    pub fn name(self) -> &'static str {
        self.data().name
    }

    /// Looks a gate up by name or alias, ignoring case.
    pub fn from_name(name: &str) -> Option<Gate> {
        GATES
            .iter()
            .find(|g| {
                g.name.eq_ignore_ascii_case(name)
                    || g.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
            })
            .map(|g| g.gate)
    }

    pub fn all() -> impl Iterator<Item = Gate> {
        GATES.iter().map(|g| g.gate)
    }

    pub fn tableau(self) -> Option<&'static Tableau> {
        cache().tableaus[self as usize].as_ref()
    }

    pub fn inverse_tableau(self) -> Option<&'static Tableau> {
        cache().inverses[self as usize].as_ref()
    }

    /// The gate's unitary as a dense row-major matrix.
    pub fn unitary_matrix(self) -> Option<Vec<Complex64>> {
        self.data()
            .unitary
            .map(|u| u.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub fn arity(self) -> usize {
        self.data().arity
    }

    pub fn flags(self) -> GateFlags {
        self.data().flags
    }

    pub fn is_unitary(self) -> bool {
        self.data().flags.unitary
    }

    pub fn is_noise(self) -> bool {
        self.data().flags.noise
    }

    pub fn produces_measurement(self) -> bool {
        matches!(self, Gate::M | Gate::Mr)
    }
}

impl std::fmt::Display for Gate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
