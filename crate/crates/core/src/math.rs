//! Small-tensor helpers: Voigt mappings, deviators, error function.
//!
//! Symmetric second-order tensors use the Voigt order
//! `[11, 22, 33, 12, 23, 13]`. Fourth-order tangents with both minor
//! symmetries are stored as 6x6 matrices of plain tensor components
//! (no factor-2 bookkeeping inside the matrix; engineering shear lives in
//! the FE B-matrices and in [`contract_voigt`]).

use nalgebra::{Matrix3, Matrix6, Vector3};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;
pub type Voigt6 = Matrix6<f64>;

/// Voigt index pairs in the order `[11, 22, 33, 12, 23, 13]`.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

/// Error function, |erf(x)| accurate to <= 1 ulp (musl libm port).
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Deviator `A - tr(A)/3 I`.
#[inline]
pub fn dev(a: &Mat3) -> Mat3 {
    a - Mat3::identity() * (a.trace() / 3.0)
}

/// Symmetric tensor to Voigt vector (plain components).
#[inline]
pub fn to_voigt(a: &Mat3) -> [f64; 6] {
    [
        a[(0, 0)],
        a[(1, 1)],
        a[(2, 2)],
        a[(0, 1)],
        a[(1, 2)],
        a[(0, 2)],
    ]
}

/// Voigt vector (plain components) to symmetric tensor.
#[inline]
pub fn from_voigt(v: &[f64; 6]) -> Mat3 {
    Mat3::new(v[0], v[3], v[5], v[3], v[1], v[4], v[5], v[4], v[2])
}

/// Rank-one product `(A ⊗ B)_{ijkl} = A_ij B_kl` in Voigt storage.
pub fn dyad(a: &Mat3, b: &Mat3) -> Voigt6 {
    let va = to_voigt(a);
    let vb = to_voigt(b);
    let mut out = Voigt6::zeros();
    for i in 0..6 {
        for j in 0..6 {
            out[(i, j)] = va[i] * vb[j];
        }
    }
    out
}

/// Symmetric fourth-order identity `(δik δjl + δil δjk)/2` in Voigt storage.
pub fn sym_identity() -> Voigt6 {
    let mut out = Voigt6::zeros();
    for (idx, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
        out[(idx, idx)] = if i == j { 1.0 } else { 0.5 };
    }
    out
}

/// Contraction `c : d` of a minor-symmetric Voigt tangent with a symmetric
/// tensor; off-diagonal Voigt slots count twice.
pub fn contract_voigt(c: &Voigt6, d: &Mat3) -> Mat3 {
    let vd = to_voigt(d);
    let mut out = [0.0; 6];
    for i in 0..6 {
        let mut acc = 0.0;
        for j in 0..6 {
            let w = if j < 3 { 1.0 } else { 2.0 };
            acc += c[(i, j)] * w * vd[j];
        }
        out[i] = acc;
    }
    from_voigt(&out)
}

/// Frobenius norm of a 6x6 Voigt tangent.
pub fn voigt_norm(c: &Voigt6) -> f64 {
    c.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative gap `|a - b| / max(|a|, |b|)`, zero when both are below `floor`.
///
/// Used throughout the oracles: quantities that underflow to (sub)normal
/// zero on both routes compare equal instead of producing 0/0.
pub fn rel_gap(a: f64, b: f64, floor: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m <= floor {
        0.0
    } else {
        (a - b).abs() / m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 20-point reference table, 22 significant digits (arbitrary-precision
    /// evaluation of the integral definition).
    const ERF_TABLE: [(f64, f64); 20] = [
        (-6.0, -0.9999999999999999784803),
        (-4.5, -0.9999999998033839558457),
        (-3.2, -0.999993974238848237905),
        (-2.4, -0.9993114861033549214303),
        (-1.7, -0.9837904585907745636262),
        (-1.2, -0.9103139782296353802384),
        (-0.8, -0.7421009647076604861671),
        (-0.5, -0.5204998778130465376827),
        (-0.25, -0.2763263901682369329851),
        (-0.05, -0.05637197779701662383127),
        (0.05, 0.05637197779701662383127),
        (0.2, 0.2227025892104784541401),
        (0.45, 0.4754817197869236753197),
        (0.75, 0.7111556336535151315989),
        (1.1, 0.8802050695740816997719),
        (1.6, 0.9763483833446440077743),
        (2.3, 0.9988568234026433485347),
        (3.1, 0.999988351342632800404),
        (4.2, 0.9999999971445058204078),
        (5.5, 0.9999999999999926421521),
    ];

    #[test]
    fn erf_matches_reference_to_1e12() {
        for &(x, want) in &ERF_TABLE {
            let got = erf(x);
            assert!(
                rel_gap(got, want, 0.0) < 1e-12,
                "erf({x}): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn voigt_round_trip_and_contraction() {
        let a = Mat3::new(1.0, 0.2, 0.3, 0.2, 2.0, 0.4, 0.3, 0.4, 3.0);
        assert_eq!(from_voigt(&to_voigt(&a)), a);
        // I_s : d = d for symmetric d.
        let c = sym_identity();
        assert!((contract_voigt(&c, &a) - a).norm() < 1e-14);
        // (x ⊗ y) : d = x (y : d).
        let x = Mat3::new(0.5, 0.1, 0.0, 0.1, 0.7, 0.2, 0.0, 0.2, 0.9);
        let want = x * a.dot(&a);
        let got = contract_voigt(&dyad(&x, &a), &a);
        assert!((got - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn deviator_is_traceless() {
        let a = Mat3::new(1.0, 0.2, 0.3, 0.2, 2.0, 0.4, 0.3, 0.4, 3.0);
        assert!(dev(&a).trace().abs() < 1e-14);
    }
}
