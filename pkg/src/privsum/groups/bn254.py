"""Production backend: a 254-bit Barreto-Naehrig pairing-friendly curve.

Curve family parameter u = 4965661367192848881 gives

    q = 36u^4 + 36u^3 + 24u^2 + 6u + 1   (254-bit base-field prime)
    p = 36u^4 + 36u^3 + 18u^2 + 6u + 1   (254-bit prime group order)

with E/F_q : y^2 = x^3 + 3, embedding degree 12 and a sextic D-type twist
E'/F_q2 : y^2 = x^3 + 3/xi over F_q2 = F_q[i]/(i^2 + 1) with xi = 9 + i.
These are the widely deployed "alt_bn128" parameters, so the G2 generator
and tower constants are independently cross-checkable.

Tower:  F_q2 = F_q[i]/(i^2+1),  F_q6 = F_q2[v]/(v^3 - xi),
        F_q12 = F_q6[w]/(w^2 - v).

G1 lives on E(F_q) (cofactor 1), G2 on the order-p subgroup of E'(F_q2),
and GT is the order-p subgroup of F_q12^* generated by e(P, Q).  The
pairing is the optimal ate pairing: a Miller loop over NAF(6u+2) with the
two Frobenius line corrections, followed by the standard easy/hard final
exponentiation.

Field elements are tuples of gmpy2 mpz; curve points are affine coordinate
pairs (None = point at infinity).  Not constant-time; side channels are out
of scope.
"""

from __future__ import annotations

import hashlib

from gmpy2 import invert, mpz

from .base import Group, InvalidElementError, OpCounter, PairingGroup

# -- parameters --------------------------------------------------------------

U = 4965661367192848881
Q = mpz(36 * U**4 + 36 * U**3 + 24 * U**2 + 6 * U + 1)
P_ORDER = mpz(36 * U**4 + 36 * U**3 + 18 * U**2 + 6 * U + 1)
ATE_LOOP = 6 * U + 2

_B1 = mpz(3)
_FQ_BYTES = 32

G1_GEN = (mpz(1), mpz(2))

# -- F_q2 = F_q[i]/(i^2 + 1); elements (c0, c1) = c0 + c1*i ------------------

FQ2_ZERO = (mpz(0), mpz(0))
FQ2_ONE = (mpz(1), mpz(0))
XI = (mpz(9), mpz(1))


def fq2_add(a, b):
    return ((a[0] + b[0]) % Q, (a[1] + b[1]) % Q)


def fq2_sub(a, b):
    return ((a[0] - b[0]) % Q, (a[1] - b[1]) % Q)


def fq2_neg(a):
    return (-a[0] % Q, -a[1] % Q)


def fq2_conj(a):
    return (a[0], -a[1] % Q)


def fq2_mul(a, b):
    v0 = a[0] * b[0]
    v1 = a[1] * b[1]
    c1 = (a[0] + a[1]) * (b[0] + b[1]) - v0 - v1
    return ((v0 - v1) % Q, c1 % Q)


def fq2_sqr(a):
    c0 = (a[0] + a[1]) * (a[0] - a[1])
    c1 = 2 * a[0] * a[1]
    return (c0 % Q, c1 % Q)


def fq2_scale(a, k):
    return (a[0] * k % Q, a[1] * k % Q)


def fq2_double(a):
    return (2 * a[0] % Q, 2 * a[1] % Q)


def fq2_mul_xi(a):
    # (c0 + c1 i)(9 + i) = (9 c0 - c1) + (9 c1 + c0) i
    return ((9 * a[0] - a[1]) % Q, (9 * a[1] + a[0]) % Q)


def fq2_inv(a):
    t = invert(a[0] * a[0] + a[1] * a[1], Q)
    return (a[0] * t % Q, -a[1] * t % Q)


def fq2_pow(a, e):
    r = FQ2_ONE
    for bit in bin(e)[2:]:
        r = fq2_sqr(r)
        if bit == "1":
            r = fq2_mul(r, a)
    return r


def fq_sqrt(a):
    # q = 3 mod 4
    a = a % Q
    r = pow(a, (Q + 1) // 4, Q)
    return r if r * r % Q == a else None


def fq2_sqrt(a):
    """Square root in F_q2 by the complex method; None if a is a non-residue."""
    a0, a1 = a[0] % Q, a[1] % Q
    if a1 == 0:
        r = fq_sqrt(a0)
        if r is not None:
            return (mpz(r), mpz(0))
        r = fq_sqrt(-a0 % Q)  # a0 = -(r^2), sqrt = r*i
        return None if r is None else (mpz(0), mpz(r))
    lam = fq_sqrt((a0 * a0 + a1 * a1) % Q)
    if lam is None:
        return None
    inv2 = invert(2, Q)
    for delta in ((a0 + lam) * inv2 % Q, (a0 - lam) * inv2 % Q):
        x0 = fq_sqrt(delta)
        if x0 is not None and x0 != 0:
            x1 = a1 * invert(2 * x0, Q) % Q
            cand = (mpz(x0), mpz(x1))
            if fq2_sqr(cand) == (a0, a1):
                return cand
    return None


# -- F_q6 = F_q2[v]/(v^3 - xi); elements (c0, c1, c2) ------------------------

FQ6_ZERO = (FQ2_ZERO, FQ2_ZERO, FQ2_ZERO)
FQ6_ONE = (FQ2_ONE, FQ2_ZERO, FQ2_ZERO)


def fq6_add(a, b):
    return (fq2_add(a[0], b[0]), fq2_add(a[1], b[1]), fq2_add(a[2], b[2]))


def fq6_sub(a, b):
    return (fq2_sub(a[0], b[0]), fq2_sub(a[1], b[1]), fq2_sub(a[2], b[2]))


def fq6_neg(a):
    return (fq2_neg(a[0]), fq2_neg(a[1]), fq2_neg(a[2]))


def fq6_mul(a, b):
    t0 = fq2_mul(a[0], b[0])
    t1 = fq2_mul(a[1], b[1])
    t2 = fq2_mul(a[2], b[2])
    c0 = fq2_add(t0, fq2_mul_xi(fq2_sub(fq2_sub(
        fq2_mul(fq2_add(a[1], a[2]), fq2_add(b[1], b[2])), t1), t2)))
    c1 = fq2_add(fq2_sub(fq2_sub(
        fq2_mul(fq2_add(a[0], a[1]), fq2_add(b[0], b[1])), t0), t1), fq2_mul_xi(t2))
    c2 = fq2_add(fq2_sub(fq2_sub(
        fq2_mul(fq2_add(a[0], a[2]), fq2_add(b[0], b[2])), t0), t2), t1)
    return (c0, c1, c2)


def fq6_mul_sparse01(a, b0, b1):
    """Multiply by b0 + b1*v (b2 = 0); the shape of Miller-loop line values."""
    t0 = fq2_mul(a[0], b0)
    t1 = fq2_mul(a[1], b1)
    c0 = fq2_add(t0, fq2_mul_xi(fq2_mul(a[2], b1)))
    c1 = fq2_sub(fq2_sub(fq2_mul(fq2_add(a[0], a[1]), fq2_add(b0, b1)), t0), t1)
    c2 = fq2_add(fq2_mul(a[2], b0), t1)
    return (c0, c1, c2)


def fq6_scale_fq2(a, k):
    return (fq2_mul(a[0], k), fq2_mul(a[1], k), fq2_mul(a[2], k))


def fq6_sqr(a):
    s0 = fq2_sqr(a[0])
    s1 = fq2_double(fq2_mul(a[0], a[1]))
    s2 = fq2_sqr(fq2_add(fq2_sub(a[0], a[1]), a[2]))
    s3 = fq2_double(fq2_mul(a[1], a[2]))
    s4 = fq2_sqr(a[2])
    c0 = fq2_add(s0, fq2_mul_xi(s3))
    c1 = fq2_add(s1, fq2_mul_xi(s4))
    c2 = fq2_sub(fq2_sub(fq2_add(fq2_add(s1, s2), s3), s0), s4)
    return (c0, c1, c2)


def fq6_mul_tau(a):
    """Multiply by v (shifts coefficients; v^3 = xi)."""
    return (fq2_mul_xi(a[2]), a[0], a[1])


def fq6_inv(a):
    A = fq2_sub(fq2_sqr(a[0]), fq2_mul_xi(fq2_mul(a[1], a[2])))
    B = fq2_sub(fq2_mul_xi(fq2_sqr(a[2])), fq2_mul(a[0], a[1]))
    C = fq2_sub(fq2_sqr(a[1]), fq2_mul(a[0], a[2]))
    F = fq2_add(
        fq2_mul(a[0], A),
        fq2_mul_xi(fq2_add(fq2_mul(a[2], B), fq2_mul(a[1], C))),
    )
    Finv = fq2_inv(F)
    return (fq2_mul(A, Finv), fq2_mul(B, Finv), fq2_mul(C, Finv))


# -- F_q12 = F_q6[w]/(w^2 - v); elements (c0, c1) ----------------------------

FQ12_ONE = (FQ6_ONE, FQ6_ZERO)


def fq12_mul(a, b):
    v0 = fq6_mul(a[0], b[0])
    v1 = fq6_mul(a[1], b[1])
    c1 = fq6_sub(fq6_sub(fq6_mul(fq6_add(a[0], a[1]), fq6_add(b[0], b[1])), v0), v1)
    return (fq6_add(v0, fq6_mul_tau(v1)), c1)


def fq12_sqr(a):
    t = fq6_mul(a[0], a[1])
    c0 = fq6_sub(
        fq6_sub(fq6_mul(fq6_add(a[0], a[1]), fq6_add(a[0], fq6_mul_tau(a[1]))), t),
        fq6_mul_tau(t),
    )
    return (c0, fq6_add(t, t))


def fq12_conj(a):
    return (a[0], fq6_neg(a[1]))


def fq12_inv(a):
    t = fq6_inv(fq6_sub(fq6_sqr(a[0]), fq6_mul_tau(fq6_sqr(a[1]))))
    return (fq6_mul(a[0], t), fq6_neg(fq6_mul(a[1], t)))


def fq12_pow(a, e):
    if e == 0:
        return FQ12_ONE
    r = FQ12_ONE
    for bit in bin(e)[2:]:
        r = fq12_sqr(r)
        if bit == "1":
            r = fq12_mul(r, a)
    return r


# Frobenius constants: FROB1[j] = xi^(j*(q-1)/6) in F_q2, FROB2[j] the real
# scalar xi^(j*(q^2-1)/6).
FROB1 = [fq2_pow(XI, j * (int(Q) - 1) // 6) for j in range(6)]
FROB2 = [fq2_mul(g, fq2_conj(g))[0] for g in FROB1]


def fq12_frobenius(a):
    x, y = a
    return (
        (fq2_conj(x[0]),
         fq2_mul(fq2_conj(x[1]), FROB1[2]),
         fq2_mul(fq2_conj(x[2]), FROB1[4])),
        (fq2_mul(fq2_conj(y[0]), FROB1[1]),
         fq2_mul(fq2_conj(y[1]), FROB1[3]),
         fq2_mul(fq2_conj(y[2]), FROB1[5])),
    )


def fq12_frobenius_p2(a):
    x, y = a
    return (
        (x[0], fq2_scale(x[1], FROB2[2]), fq2_scale(x[2], FROB2[4])),
        (fq2_scale(y[0], FROB2[1]), fq2_scale(y[1], FROB2[3]), fq2_scale(y[2], FROB2[5])),
    )


# -- short Weierstrass arithmetic, affine + Jacobian -------------------------
# G1 over F_q (b = 3) specialized for speed; G2 over F_q2 via the fq2_* ops.

def g1_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    x1, y1 = a
    x2, y2 = b
    if x1 == x2:
        if (y1 + y2) % Q == 0:
            return None
        lam = 3 * x1 * x1 % Q * invert(2 * y1, Q) % Q
    else:
        lam = (y2 - y1) * invert(x2 - x1, Q) % Q
    x3 = (lam * lam - x1 - x2) % Q
    return (x3, (lam * (x1 - x3) - y1) % Q)


def g1_neg(a):
    return None if a is None else (a[0], -a[1] % Q)


def _g1_jac_double(p):
    X, Y, Z = p
    if Y == 0:
        return (mpz(0), mpz(1), mpz(0))
    A = X * X % Q
    B = Y * Y % Q
    C = B * B % Q
    D = 2 * ((X + B) ** 2 - A - C) % Q
    E = 3 * A % Q
    X3 = (E * E - 2 * D) % Q
    Y3 = (E * (D - X3) - 8 * C) % Q
    Z3 = 2 * Y * Z % Q
    return (X3, Y3, Z3)


def _g1_jac_add_affine(p, a):
    # mixed addition, a affine
    X1, Y1, Z1 = p
    if Z1 == 0:
        return (a[0], a[1], mpz(1))
    x2, y2 = a
    Z1Z1 = Z1 * Z1 % Q
    U2 = x2 * Z1Z1 % Q
    S2 = y2 * Z1 * Z1Z1 % Q
    H = (U2 - X1) % Q
    r = (S2 - Y1) % Q
    if H == 0:
        if r == 0:
            return _g1_jac_double(p)
        return (mpz(0), mpz(1), mpz(0))
    HH = H * H % Q
    I = 4 * HH % Q
    J = H * I % Q
    r = 2 * r % Q
    V = X1 * I % Q
    X3 = (r * r - J - 2 * V) % Q
    Y3 = (r * (V - X3) - 2 * Y1 * J) % Q
    Z3 = ((Z1 + H) ** 2 - Z1Z1 - HH) % Q
    return (X3, Y3, Z3)


def g1_mul(a, k):
    k %= int(P_ORDER)
    if a is None or k == 0:
        return None
    acc = (mpz(0), mpz(1), mpz(0))
    for bit in bin(k)[2:]:
        acc = _g1_jac_double(acc)
        if bit == "1":
            acc = _g1_jac_add_affine(acc, a)
    X, Y, Z = acc
    if Z == 0:
        return None
    zinv = invert(Z, Q)
    zinv2 = zinv * zinv % Q
    return (X * zinv2 % Q, Y * zinv2 * zinv % Q)


def g1_on_curve(a):
    if a is None:
        return True
    x, y = a
    return (y * y - x * x * x - _B1) % Q == 0


def g2_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    x1, y1 = a
    x2, y2 = b
    if x1 == x2:
        if fq2_add(y1, y2) == FQ2_ZERO:
            return None
        lam = fq2_mul(fq2_scale(fq2_sqr(x1), 3), fq2_inv(fq2_double(y1)))
    else:
        lam = fq2_mul(fq2_sub(y2, y1), fq2_inv(fq2_sub(x2, x1)))
    x3 = fq2_sub(fq2_sub(fq2_sqr(lam), x1), x2)
    return (x3, fq2_sub(fq2_mul(lam, fq2_sub(x1, x3)), y1))


def g2_neg(a):
    return None if a is None else (a[0], fq2_neg(a[1]))


def g2_mul(a, k):
    if a is None:
        return None
    k = int(k)
    if k < 0:
        return g2_mul(g2_neg(a), -k)
    if k == 0:
        return None
    acc = None
    for bit in bin(k)[2:]:
        acc = g2_add(acc, acc)
        if bit == "1":
            acc = g2_add(acc, a)
    return acc


TWIST_B = fq2_scale(fq2_inv(XI), 3)


def g2_on_curve(a):
    if a is None:
        return True
    x, y = a
    return fq2_sub(fq2_sub(fq2_sqr(y), fq2_mul(fq2_sqr(x), x)), TWIST_B) == FQ2_ZERO


G2_GEN = (
    (mpz(10857046999023057135944570762232829481370756359578518086990519993285655852781),
     mpz(11559732032986387107991004021392285783925812861821192530917403151452391805634)),
    (mpz(8495653923123431417604973247489272438418190587263600148770280649306958101930),
     mpz(4082367875863433681332203403145435568316851327593401208105741076214120093531)),
)

# Twist curve cofactor: #E'(F_q2) = p * (2q - p).
G2_COFACTOR = int(2 * Q - P_ORDER)


# -- optimal ate pairing ------------------------------------------------------

def _naf(x):
    out = []
    while x > 0:
        if x & 1:
            d = 2 - (x % 4)
            x -= d
        else:
            d = 0
        out.append(d)
        x >>= 1
    return out


_ATE_NAF = list(reversed(_naf(ATE_LOOP)))[1:]


def _line_double(r, p):
    """Doubling step: returns line coefficients (a, b, c) and 2r (Jacobian)."""
    X, Y, Z = r
    px, py = p
    r_t = fq2_sqr(Z)
    A = fq2_sqr(X)
    B = fq2_sqr(Y)
    C = fq2_sqr(B)
    D = fq2_double(fq2_sub(fq2_sub(fq2_sqr(fq2_add(X, B)), A), C))
    E = fq2_add(fq2_double(A), A)
    F = fq2_sqr(E)
    C8 = fq2_double(fq2_double(fq2_double(C)))
    rx = fq2_sub(F, fq2_double(D))
    ry = fq2_sub(fq2_mul(E, fq2_sub(D, rx)), C8)
    rz = fq2_sub(fq2_sub(fq2_sqr(fq2_add(Y, Z)), B), r_t)
    a = fq2_sub(
        fq2_sqr(fq2_add(X, E)),
        fq2_add(fq2_add(A, F), fq2_double(fq2_double(B))),
    )
    b = fq2_scale(fq2_neg(fq2_double(fq2_mul(E, r_t))), px)
    c = fq2_scale(fq2_double(fq2_mul(rz, r_t)), py)
    return a, b, c, (rx, ry, rz)


def _line_add(r, q2pt, p, q_ysq):
    """Addition step: line through r and affine twist point q2pt, eval at p."""
    X, Y, Z = r
    qx, qy = q2pt
    px, py = p
    r_t = fq2_sqr(Z)
    B = fq2_mul(qx, r_t)
    D = fq2_mul(fq2_sub(fq2_sub(fq2_sqr(fq2_add(qy, Z)), q_ysq), r_t), r_t)
    H = fq2_sub(B, X)
    I = fq2_sqr(H)
    E = fq2_double(fq2_double(I))
    J = fq2_mul(H, E)
    L1 = fq2_sub(D, fq2_double(Y))
    V = fq2_mul(X, E)
    rx = fq2_sub(fq2_sub(fq2_sqr(L1), J), fq2_double(V))
    rz = fq2_sub(fq2_sub(fq2_sqr(fq2_add(Z, H)), r_t), I)
    ry = fq2_sub(
        fq2_mul(fq2_sub(V, rx), L1),
        fq2_double(fq2_mul(Y, J)),
    )
    t = fq2_sub(fq2_sub(fq2_sqr(fq2_add(qy, rz)), q_ysq), fq2_sqr(rz))
    a = fq2_sub(fq2_double(fq2_mul(L1, qx)), t)
    b = fq2_double(fq2_scale(fq2_neg(L1), px))
    c = fq2_double(fq2_scale(rz, py))
    return a, b, c, (rx, ry, rz)


def _mul_line(f, a, b, c):
    """f *= (c + b*w + a*v*w), the sparse shape of every line value."""
    f0, f1 = f
    v0 = fq6_scale_fq2(f0, c)
    v1 = fq6_mul_sparse01(f1, b, a)
    t1 = fq6_mul_sparse01(fq6_add(f0, f1), fq2_add(b, c), a)
    r1 = fq6_sub(fq6_sub(t1, v0), v1)
    r0 = fq6_add(v0, fq6_mul_tau(v1))
    return (r0, r1)


def miller_loop(q2pt, g1pt):
    if q2pt is None or g1pt is None:
        return FQ12_ONE
    qx, qy = q2pt
    px, py = g1pt
    p_aff = (px % Q, py % Q)
    T = (qx, qy, FQ2_ONE)
    neg_q = (qx, fq2_neg(qy))
    q_ysq = fq2_sqr(qy)
    f = FQ12_ONE
    for digit in _ATE_NAF:
        f = fq12_sqr(f)
        a, b, c, T = _line_double(T, p_aff)
        f = _mul_line(f, a, b, c)
        if digit == 1:
            a, b, c, T = _line_add(T, q2pt, p_aff, q_ysq)
            f = _mul_line(f, a, b, c)
        elif digit == -1:
            a, b, c, T = _line_add(T, neg_q, p_aff, q_ysq)
            f = _mul_line(f, a, b, c)
    # Frobenius correction lines: Q1 = pi(Q), Q2 = -pi^2(Q).
    q1 = (fq2_mul(fq2_conj(qx), FROB1[2]), fq2_mul(fq2_conj(qy), FROB1[3]))
    q2 = (fq2_scale(qx, FROB2[2]), qy)
    a, b, c, T = _line_add(T, q1, p_aff, fq2_sqr(q1[1]))
    f = _mul_line(f, a, b, c)
    a, b, c, T = _line_add(T, q2, p_aff, fq2_sqr(q2[1]))
    f = _mul_line(f, a, b, c)
    return f


def final_exponentiation(f):
    # easy part: f^((q^6 - 1)(q^2 + 1))
    t1 = fq12_mul(fq12_conj(f), fq12_inv(f))
    t1 = fq12_mul(t1, fq12_frobenius_p2(t1))
    # hard part (Devegili-Scott addition chain; u > 0)
    fp1 = fq12_frobenius(t1)
    fp2 = fq12_frobenius_p2(t1)
    fp3 = fq12_frobenius(fp2)
    fu1 = fq12_pow(t1, U)
    fu2 = fq12_pow(fu1, U)
    fu3 = fq12_pow(fu2, U)
    y3 = fq12_conj(fq12_frobenius(fu1))
    fu2p = fq12_frobenius(fu2)
    fu3p = fq12_frobenius(fu3)
    y2 = fq12_frobenius_p2(fu2)
    y0 = fq12_mul(fq12_mul(fp1, fp2), fp3)
    y1 = fq12_conj(t1)
    y5 = fq12_conj(fu2)
    y4 = fq12_conj(fq12_mul(fu1, fu2p))
    y6 = fq12_conj(fq12_mul(fu3, fu3p))
    t0 = fq12_mul(fq12_mul(fq12_sqr(y6), y4), y5)
    t1b = fq12_mul(fq12_mul(y3, y5), t0)
    t0 = fq12_mul(t0, y2)
    t1b = fq12_mul(fq12_sqr(t1b), t0)
    t1b = fq12_sqr(t1b)
    t0 = fq12_mul(t1b, y1)
    t1b = fq12_mul(t1b, y0)
    t0 = fq12_sqr(t0)
    return fq12_mul(t0, t1b)


def pairing(g1pt, q2pt):
    """Optimal ate pairing e : G1 x G2 -> GT (identity inputs permitted)."""
    if g1pt is None or q2pt is None:
        return FQ12_ONE
    return final_exponentiation(miller_loop(q2pt, g1pt))


# -- canonical encodings ------------------------------------------------------

def _fq2_parity(y):
    return int(y[0] & 1) if y[0] != 0 else int(y[1] & 1)


def _encode_fq(x):
    return int(x).to_bytes(_FQ_BYTES, "big")


def _decode_fq(data):
    x = int.from_bytes(data, "big")
    if x >= Q:
        raise InvalidElementError("field element not reduced mod q")
    return mpz(x)


# -- descriptors --------------------------------------------------------------

class BN254Group(Group):
    """G1 = E(F_q): the production DDH group for single-round KDK and PCL."""

    kind = "curve"
    order = int(P_ORDER)
    generator = G1_GEN
    identity = None

    def mul(self, a, b, counter: OpCounter | None = None):
        if counter is not None:
            counter.multiplications += 1
        return g1_add(a, b)

    def exp(self, base, scalar, counter: OpCounter | None = None):
        if counter is not None:
            counter.exponentiations += 1
        return g1_mul(base, scalar % self.order)

    def neg(self, a, counter: OpCounter | None = None):
        if counter is not None:
            counter.inversions += 1
        return g1_neg(a)

    def encode(self, a) -> bytes:
        if a is None:
            return b"\x00" + b"\x00" * _FQ_BYTES
        flag = 2 + int(a[1] & 1)
        return bytes([flag]) + _encode_fq(a[0])

    def decode(self, data: bytes):
        if len(data) != 1 + _FQ_BYTES:
            raise InvalidElementError("bad G1 encoding length")
        flag = data[0]
        if flag == 0:
            if any(data[1:]):
                raise InvalidElementError("bad infinity encoding")
            return None
        if flag not in (2, 3):
            raise InvalidElementError(f"bad G1 flag byte {flag}")
        x = _decode_fq(data[1:])
        y = fq_sqrt((x * x * x + _B1) % Q)
        if y is None:
            raise InvalidElementError("x is not on the curve")
        if (y & 1) != flag - 2:
            y = Q - y
        return (mpz(x), mpz(y))


class BN254TwistGroup(Group):
    """G2: the order-p subgroup of the sextic twist E'(F_q2)."""

    kind = "curve"
    order = int(P_ORDER)
    generator = G2_GEN
    identity = None

    def mul(self, a, b, counter: OpCounter | None = None):
        if counter is not None:
            counter.multiplications += 1
        return g2_add(a, b)

    def exp(self, base, scalar, counter: OpCounter | None = None):
        if counter is not None:
            counter.exponentiations += 1
        return g2_mul(base, scalar % self.order)

    def neg(self, a, counter: OpCounter | None = None):
        if counter is not None:
            counter.inversions += 1
        return g2_neg(a)

    def encode(self, a) -> bytes:
        if a is None:
            return b"\x00" + b"\x00" * (2 * _FQ_BYTES)
        flag = 2 + _fq2_parity(a[1])
        return bytes([flag]) + _encode_fq(a[0][0]) + _encode_fq(a[0][1])

    def decode(self, data: bytes):
        if len(data) != 1 + 2 * _FQ_BYTES:
            raise InvalidElementError("bad G2 encoding length")
        flag = data[0]
        if flag == 0:
            if any(data[1:]):
                raise InvalidElementError("bad infinity encoding")
            return None
        if flag not in (2, 3):
            raise InvalidElementError(f"bad G2 flag byte {flag}")
        x = (_decode_fq(data[1:1 + _FQ_BYTES]), _decode_fq(data[1 + _FQ_BYTES:]))
        y = fq2_sqrt(fq2_add(fq2_mul(fq2_sqr(x), x), TWIST_B))
        if y is None:
            raise InvalidElementError("x is not on the twist")
        if _fq2_parity(y) != flag - 2:
            y = fq2_neg(y)
        pt = (x, y)
        if g2_mul(pt, self.order) is not None:
            raise InvalidElementError("point is outside the order-p subgroup")
        return pt


class BN254TargetGroup(Group):
    """GT: the order-p subgroup of F_q12^*, generated by e(P, Q).

    Arithmetic happens in the full degree-12 extension field, which is why
    target-group operations (and dlog recovery there) are the slow path.
    """

    kind = "curve-pairing-target"
    order = int(P_ORDER)
    identity = FQ12_ONE

    def __init__(self, generator):
        self.generator = generator

    def mul(self, a, b, counter: OpCounter | None = None):
        if counter is not None:
            counter.multiplications += 1
        return fq12_mul(a, b)

    def exp(self, base, scalar, counter: OpCounter | None = None):
        if counter is not None:
            counter.exponentiations += 1
        return fq12_pow(base, scalar % self.order)

    def neg(self, a, counter: OpCounter | None = None):
        if counter is not None:
            counter.inversions += 1
        return fq12_inv(a)

    @staticmethod
    def _coeffs(a):
        for c6 in a:
            for c2 in c6:
                yield from c2

    def encode(self, a) -> bytes:
        return b"".join(_encode_fq(c) for c in self._coeffs(a))

    def decode(self, data: bytes):
        if len(data) != 12 * _FQ_BYTES:
            raise InvalidElementError("bad GT encoding length")
        cs = [_decode_fq(data[i * _FQ_BYTES:(i + 1) * _FQ_BYTES]) for i in range(12)]
        return (
            ((cs[0], cs[1]), (cs[2], cs[3]), (cs[4], cs[5])),
            ((cs[6], cs[7]), (cs[8], cs[9]), (cs[10], cs[11])),
        )

    def in_subgroup(self, a) -> bool:
        return fq12_pow(a, self.order) == FQ12_ONE


class BN254Pairing(PairingGroup):
    """Full pairing backend: G1 = E(F_q), G2 on the twist, GT in F_q12."""

    kind = "curve-pairing"
    order = int(P_ORDER)

    def __init__(self):
        self.g1 = BN254Group()
        self.g2 = BN254TwistGroup()
        self.gt = BN254TargetGroup(pairing(G1_GEN, G2_GEN))

    def pair(self, a, b, counter: OpCounter | None = None):
        if counter is not None:
            counter.pairings += 1
        return pairing(a, b)

    def hash_to_g2(self, round_index: int):
        """Try-and-increment onto the twist, then clear the twist cofactor."""
        if round_index < 1:
            raise ValueError("round index must be >= 1")
        ctr = 0
        while True:
            digest = hashlib.shake_256(
                b"privsum/bn254-h2"
                + round_index.to_bytes(8, "big")
                + ctr.to_bytes(4, "big")
            ).digest(96)
            x = (
                mpz(int.from_bytes(digest[:48], "big") % Q),
                mpz(int.from_bytes(digest[48:], "big") % Q),
            )
            ctr += 1
            y = fq2_sqrt(fq2_add(fq2_mul(fq2_sqr(x), x), TWIST_B))
            if y is None:
                continue
            if _fq2_parity(y) == 1:
                y = fq2_neg(y)
            pt = g2_mul((x, y), G2_COFACTOR)
            if pt is not None:
                return pt
