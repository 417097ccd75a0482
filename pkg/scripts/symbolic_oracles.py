"""Chern-Simons densities computed from scratch with sympy (no kkcs code
involved): metric, Christoffel symbols, frame, spin connection, trace form.
The printed values are the frozen oracles used by the test suite.

    python3 scripts/symbolic_oracles.py hopf [--radius 1/2]
    python3 scripts/symbolic_oracles.py conformal-torus [--amplitude 3/10]

Hopf data: round sphere of radius R, phi = -R^2 cos(x0) dx1, chart
[0, pi] x [0, 2 pi]. Conformal torus: h = exp(2 a cos x0) I,
phi = sin(x0) dx1, chart [0, 2 pi]^2. Both use a diagonal metric, where the
lower-triangular Zweibein is diagonal. Fiber length 2 pi.
"""
import argparse

import mpmath
import sympy as sp

x0, x1, x2 = sp.symbols("x0 x1 x2", real=True)
X = (x0, x1, x2)
eps = sp.symbols("epsilon", positive=True)


def levi(i, j, k):
    return sp.LeviCivita(i, j, k)


def spin_connection(h, phi, zweibein):
    """Spin connection matrices A[mu] of the Kaluza-Klein metric with the
    frame E^a_alpha = e, E^2_alpha = sqrt(eps) phi_alpha, E^2_2 = sqrt(eps)."""
    G = sp.zeros(3, 3)
    G[:2, :2] = h + eps * phi * phi.T
    G[:2, 2] = eps * phi
    G[2, :2] = eps * phi.T
    G[2, 2] = eps
    Ginv = sp.simplify(G.inv())
    gam = [[[sp.simplify(sum(Ginv[l, r] * (sp.diff(G[r, m], X[n]) + sp.diff(G[r, n], X[m])
                                             - sp.diff(G[m, n], X[r])) for r in range(3)) / 2)
             for n in range(3)] for m in range(3)] for l in range(3)]
    E = sp.zeros(3, 3)
    E[:2, :2] = zweibein
    E[2, :2] = sp.sqrt(eps) * phi.T
    E[2, 2] = sp.sqrt(eps)
    assert sp.simplify(E.T * E - G) == sp.zeros(3, 3)
    Einv = sp.simplify(E.inv())  # Einv[mu, A]
    A = []
    for mu in range(3):
        M = sp.Matrix(3, 3, lambda a, b: sp.simplify(
            sum(E[a, n] * Einv[l, b] * gam[n][mu][l] for n in range(3) for l in range(3))
            - sum(Einv[l, b] * sp.diff(E[a, l], X[mu]) for l in range(3))))
        assert sp.simplify(M + M.T) == sp.zeros(3, 3), "spin connection not antisymmetric"
        A.append(M)
    return A


def trace_density(A):
    return sp.simplify(sum(
        levi(m, n, l) * ((A[m] * sp.diff(A[l], X[n])).trace() + sp.Rational(2, 3) * (A[m] * A[n] * A[l]).trace())
        for m in range(3) for n in range(3) for l in range(3)) / (4 * sp.pi))


def reduced_density(A):
    Ac = sp.Matrix(3, 3, lambda C, mu: sp.simplify(
        sum(levi(a, b, C) * A[mu][a, b] for a in range(3) for b in range(3)) / 2))
    dens = (-sum(levi(m, n, l) * Ac[c, m] * sp.diff(Ac[c, l], X[n])
                 for c in range(3) for m in range(3) for n in range(3) for l in range(3)) / (2 * sp.pi)
            + Ac.det() / sp.pi)
    return Ac, sp.simplify(dens)


def hopf(radius: str):
    R = sp.Rational(radius)
    h = sp.diag(R**2, R**2 * sp.sin(x0) ** 2)
    phi = sp.Matrix([0, -(R**2) * sp.cos(x0)])
    A = spin_connection(h, phi, sp.diag(R, R * sp.sin(x0)))
    trace = trace_density(A)
    Ac, reduced = reduced_density(A)
    direct = sp.factor(-2 * sp.pi * sp.integrate(trace, (x0, 0, sp.pi), (x1, 0, 2 * sp.pi)))
    # exact term d_1(w_0 f) - d_0(w_1 f) with w = (0, cos x0), f = 1
    stokes = sp.integrate(-sp.diff(sp.cos(x0), x0), (x0, 0, sp.pi), (x1, 0, 2 * sp.pi))
    print("A^C_mu            =", Ac.applyfunc(sp.simplify))
    print("trace density     =", trace)
    print("trace - reduced   =", sp.simplify(trace - reduced))
    print("cs_direct         =", direct, "=", sp.expand(direct))
    print("cs_direct(eps=1)  =", sp.N(direct.subs(eps, 1), 17))
    print("int exact term    =", stokes)


def conformal_torus(amplitude: str):
    a = sp.Rational(amplitude)
    u = a * sp.cos(x0)
    h = sp.exp(2 * u) * sp.eye(2)
    phi = sp.Matrix([0, sp.sin(x0)])
    A = spin_connection(h, phi, sp.exp(u) * sp.eye(2))
    trace = trace_density(A)
    _, reduced = reduced_density(A)
    print("trace - reduced   =", sp.simplify(trace - reduced))
    # the density does not depend on x1; integrate x0 numerically, x1 gives 2 pi
    mpmath.mp.dps = 30
    for e in (1, sp.Rational(1, 2)):
        fn = sp.lambdify(x0, trace.subs(eps, e), "mpmath")
        base = 2 * mpmath.pi * mpmath.quad(fn, [0, mpmath.pi, 2 * mpmath.pi])
        print(f"cs_direct(eps={e}) =", mpmath.nstr(-2 * mpmath.pi * base, 20))
    # reduced-formula integrals: int r f sqrt(h) and int f^3 sqrt(h), f = cos(x0) exp(-2u)
    r = sp.simplify(-2 * sp.exp(-2 * u) * sp.diff(u, x0, 2))
    lin = sp.integrate(sp.simplify(r * sp.cos(x0)), (x0, 0, 2 * sp.pi)) * 2 * sp.pi
    quad = 2 * mpmath.pi * mpmath.quad(sp.lambdify(x0, sp.cos(x0) ** 3 * sp.exp(-4 * u), "mpmath"),
                                       [0, mpmath.pi, 2 * mpmath.pi])
    print("int r f sqrt(h)   =", sp.simplify(lin), "=", sp.N(lin, 20))
    print("int f^3 sqrt(h)   =", mpmath.nstr(quad, 20))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("case", choices=("hopf", "conformal-torus"))
    ap.add_argument("--radius", default="1/2")
    ap.add_argument("--amplitude", default="3/10")
    args = ap.parse_args()
    if args.case == "hopf":
        hopf(args.radius)
    else:
        conformal_torus(args.amplitude)


if __name__ == "__main__":
    main()
