"""Recompute the worked examples and print their key quantities."""
import numpy as np

from scaledquat import examples as ex
from scaledquat.constructors import bb_closed_form, blaschke_circle_series, star_eval, star_product
from scaledquat.core import AlgebraContext, conj_star
from scaledquat.errors import DegenerateSubspace
from scaledquat.factorization import additive_decomposition, eigen_subspaces, junitary_factor
from scaledquat.matrix import HtMatrix
from scaledquat.realization import evaluate, is_minimal, mcmillan_degree
from scaledquat.structured import verify_certificate


def report(name, node, J, cert):
    rep = verify_certificate(node, J, cert)
    print(f"{name:28s} N={node.N} minimal={is_minimal(node)} degree={mcmillan_degree(node)} "
          f"{cert.kind.value} max residual {rep.max_residual:.1e}")


def split_all(name, node, cert, J=None):
    line = cert.kind.is_line
    ok = []
    for M in eigen_subspaces(node.A):
        if M.cols in (0, node.N):
            continue
        try:
            if cert.kind.is_junitary:
                res = junitary_factor(node, J, cert, M, "line" if line else "circle")
                parts = (res.R1, res.R2)
            else:
                res = additive_decomposition(node, cert, M, "line" if line else "circle")
                parts = (res.phi1, res.phi2)
        except DegenerateSubspace:
            continue
        ok.append(tuple(mcmillan_degree(p) for p in parts))
    print(f"  {name}: {len(ok)} nondegenerate eigen subspaces, degree splits {ok}")


def main():
    node, cert, sig = ex.brune_example()
    report("Brune section", node, sig.J, cert)
    node, cert = ex.line_blaschke_example()
    report("line Blaschke alpha=2", node, cert.J, cert)
    print("  R(0.1) =", evaluate(node, 0.1).quads()[0, 0])
    node, cert = ex.circle_blaschke_example()
    report("circle Blaschke", node, cert.J, cert)
    ctx = AlgebraContext(-1.0)
    alpha = ex.quaternion(0.3, 0.2, -0.25, 0.1)
    q = ex.quaternion(0.1, 0.2, 0.05, -0.1)
    bb = star_product(blaschke_circle_series(alpha, ctx), blaschke_circle_series(conj_star(alpha), ctx))
    s = star_eval(bb, q)
    c = bb_closed_form(alpha, q, ctx)
    print(f"  b_alpha * b_alpha^* vs closed form: mismatch {np.max(np.abs(np.subtract(s.quad(), c.quad()))):.1e}")
    node, cert, sig = ex.line_pair_example()
    report("line Blaschke pair", node, sig.J, cert)
    split_all("pair", node, cert, sig.J)

    node, cert = ex.line_antisym_example()
    report("line anti-symmetric pair", node, None, cert)
    split_all("t=-1", node, cert)
    node, cert = ex.line_antisym_example(t=0.5)
    split_all("t=0.5 (real spectrum)", node, cert)
    node, cert = ex.circle_antisym_pair_example()
    report("circle anti-symmetric pair", node, None, cert)
    split_all("t=-1", node, cert)

    node, cert = ex.double_x_example()
    report("2x on a non-minimal node", node, None, cert)
    e1 = HtMatrix.real([[1], [0]], node.ctx)
    res = additive_decomposition(node, cert, e1, "line")
    for x in (0.1, 0.3):
        v = [evaluate(p, x).quads()[0, 0, 0] for p in (node, res.phi1, res.phi2)]
        print(f"  x={x}: phi={v[0]:.3f} phi1={v[1]:.3f} phi2={v[2]:.3f}")


if __name__ == "__main__":
    main()
