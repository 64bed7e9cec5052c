import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import random_matrix, scalars
from scaledquat import examples as ex
from scaledquat.constructors import blaschke_circle, blaschke_line
from scaledquat.core import AlgebraContext, HtScalar, norm_form
from scaledquat.errors import (AInvertibilityRequired, KindMismatch, NotInClass, NotMinimal,
                               PreconditionViolated)
from scaledquat.matrix import HtMatrix, kernel_positivity_check
from scaledquat.realization import Node, evaluate, is_minimal
from scaledquat.structured import (Kind, Signature, antidiag_identity, doubled_certificate,
                                   embed_T, embed_T_certificate, functional_residual, kernel_lhs, kernel_rhs,
                                   make_phi_from_psi, solve_certificate, verify_certificate)

CTX = AlgebraContext(-1.0)
ONE1 = HtMatrix.eye(1, CTX)


def test_kind_parse():
    assert Kind.parse("line-junitary") is Kind.LINE_JUNITARY
    assert Kind.parse("LINE_ANTISYM") is Kind.LINE_ANTISYM
    assert Kind.parse("circle-j-unitary") is Kind.CIRCLE_JUNITARY
    with pytest.raises(ValueError):
        Kind.parse("ellipse")


def test_signature_validation():
    Signature(HtMatrix.real([[1, 0], [0, -1]], CTX))
    Signature(antidiag_identity(1, CTX))
    with pytest.raises(PreconditionViolated):
        Signature(HtMatrix.real([[2.0]], CTX))


def test_line_blaschke_certificate_value():
    alpha = ex.quaternion(0.7, 0.3, -0.2, 0.4)
    node, _ = blaschke_line(alpha, CTX)
    cert = solve_certificate(node, ONE1, Kind.LINE_JUNITARY)
    assert cert.H[0, 0].is_close(HtScalar.real(-1.0 / (2 * 0.7)), 1e-10)


def test_circle_blaschke_certificate_value():
    for t in (-1.0, 0.5):
        ctx = AlgebraContext(t)
        alpha = ex.quaternion(0.3, 0.2, -0.25, 0.1)
        node, _ = blaschke_circle(alpha, ctx)
        cert = solve_certificate(node, HtMatrix.eye(1, ctx), Kind.CIRCLE_JUNITARY)
        assert cert.H[0, 0].is_close(HtScalar.real(1 - norm_form(alpha, ctx)), 1e-10)


def test_line_pair_recovers_antidiagonal_H():
    node, cert, sig = ex.line_pair_example()
    solved = solve_certificate(node, sig.J, Kind.LINE_JUNITARY)
    assert solved.H.is_close(HtMatrix.real([[0, 1], [1, 0]], CTX), 1e-9)
    rep = verify_certificate(node, sig.J, solved)
    assert rep.passed and rep.max_residual < 1e-9


def test_brune_section_residuals():
    node, cert, sig = ex.brune_example()
    assert max(cert.residuals.values()) < 1e-9
    rep = verify_certificate(node, sig.J, cert)
    assert rep.passed and rep.max_residual < 1e-9


def test_perturbation_is_flagged():
    node, cert, sig = ex.brune_example()
    bad = Node(node.A, node.B + HtMatrix.real([[1e-3, 0]], CTX), node.C, node.D)
    rep = verify_certificate(bad, sig.J, cert)
    assert not rep.passed
    assert rep.max_residual >= 1e-4


def test_kind_mismatch():
    node, cert, sig = ex.brune_example()
    with pytest.raises(KindMismatch):
        verify_certificate(node, sig.J, cert, kind=Kind.CIRCLE_JUNITARY)


def test_not_minimal_rejected():
    node, cert = ex.double_x_example()
    with pytest.raises(NotMinimal):
        solve_certificate(node, None, Kind.LINE_ANTISYM)


def test_wrong_class_rejected():
    node, _ = blaschke_circle(ex.quaternion(0.3, 0.2, -0.25, 0.1), CTX)
    with pytest.raises(NotInClass):
        solve_certificate(node, ONE1, Kind.LINE_JUNITARY)


def test_circle_needs_invertible_A():
    node, _ = blaschke_line(ex.quaternion(1.0), CTX)
    z = Node(HtMatrix.zeros(1, 1, CTX), node.B, node.C, node.D)
    with pytest.raises(AInvertibilityRequired):
        solve_certificate(z, ONE1, Kind.CIRCLE_JUNITARY)


def test_kernel_sign_matches_H():
    # h < 0 here, so -K is a positive kernel
    node, cert = blaschke_line(ex.quaternion(0.8, 0.1, 0.2, -0.3), CTX)
    assert cert.H[0, 0].a.real < 0

    def K(x, y):
        return -kernel_lhs(Kind.LINE_JUNITARY, ONE1, evaluate(node, x), evaluate(node, y), x, y)

    pts = [0.05, 0.1, 0.2, 0.3]
    assert kernel_positivity_check(K, pts)
    assert not kernel_positivity_check(lambda x, y: -K(x, y), pts)


def test_kernel_identity_pointwise():
    node, cert = ex.circle_blaschke_example()
    Hi = HtMatrix.real([[1.0 / cert.H[0, 0].a.real]], CTX)
    for x, y in [(0.1, 0.2), (-0.3, 0.25)]:
        L = kernel_lhs(Kind.CIRCLE_JUNITARY, ONE1, evaluate(node, x), evaluate(node, y), x, y)
        assert L.is_close(kernel_rhs(node, Hi, x, y), 1e-12)


def test_phi_from_zero_psi():
    z = HtMatrix.zeros
    psi = Node(z(1, 1, CTX), z(1, 1, CTX), z(1, 1, CTX), z(1, 1, CTX))
    phi = make_phi_from_psi(psi, "line")
    for x in (0.1, 0.3):
        assert evaluate(phi, x).norm() == 0


def test_doubled_node_line(rng):
    p0 = ex.quaternion(0.4, 0.3, -0.2, 0.5)
    psi = ex.psi_power_node(p0, 1, CTX)
    phi = make_phi_from_psi(psi, "line")
    assert is_minimal(phi)
    for x in (0.1, -0.2):
        want = evaluate(psi, x) - evaluate(psi, -x).star()
        assert evaluate(phi, x).is_close(want, 1e-12)
    rep = verify_certificate(phi, None, doubled_certificate(psi, "line"))
    assert rep.passed and rep.max_residual < 1e-9


def test_doubled_node_circle():
    psi = ex.psi_power_node(ex.quaternion(0.4, 0.3, -0.2, 0.5), 1, CTX)
    phi = make_phi_from_psi(psi, "circle")
    for x in (0.1, -0.2):
        want = evaluate(psi, x) - evaluate(psi, 1.0 / x).star()
        assert evaluate(phi, x).is_close(want, 1e-10)
    rep = verify_certificate(phi, None, doubled_certificate(psi, "circle"))
    assert rep.passed and rep.max_residual < 1e-9


def test_embed_T_constant():
    D = HtMatrix.real([[0.0, 1.0], [-1.0, 0.0]], CTX)
    T = embed_T(Node.constant(D))
    assert T.N == 0 and T.D.is_close(HtMatrix.block([[HtMatrix.eye(2, CTX), D],
                                                    [HtMatrix.zeros(2, 2, CTX), HtMatrix.eye(2, CTX)]]), 0)


def test_embed_T_line_and_circle():
    for node, cert in (ex.line_antisym_example(), ex.circle_antisym_example()):
        J, cT = embed_T_certificate(node, cert)
        rep = verify_certificate(embed_T(node), J, cT)
        assert rep.passed and rep.max_residual < 1e-9
    with pytest.raises(KindMismatch):
        n, c, s = ex.brune_example()
        embed_T_certificate(n, c)


def test_circle_antisym_example_value():
    node, cert = ex.circle_antisym_example()
    p0 = node.A[0, 0]
    from scaledquat.core import invert, mul
    x = 0.3
    one = HtScalar.real(1.0)
    want = mul(one + p0 * x, invert(one - p0 * x, CTX), CTX) * 0.5
    assert evaluate(node, x)[0, 0].is_close(want, 1e-12)


# properties ------------------------------------------------------------------

@given(scalars(st.floats(-2, 2)), st.sampled_from([-1.0, -0.5, 0.5, 2.0]))
def test_line_blaschke_solved_matches_formula(alpha, t):
    assume(abs(alpha.a.real) > 0.1)
    ctx = AlgebraContext(t)
    node, cert = blaschke_line(alpha, ctx)
    solved = solve_certificate(node, HtMatrix.eye(1, ctx), Kind.LINE_JUNITARY)
    assert solved.H.is_close(cert.H, 1e-8 * max(1.0, cert.H.norm()))
    x = 0.3 / max(1.0, abs(alpha.a) + abs(alpha.b))
    assert functional_residual(node, HtMatrix.eye(1, ctx), Kind.LINE_JUNITARY, x) < 1e-9


@given(scalars(st.floats(-0.6, 0.6)), st.sampled_from([-1.0, 0.5]))
def test_circle_blaschke_verifies(alpha, t):
    ctx = AlgebraContext(t)
    assume(abs(1 - norm_form(alpha, ctx)) > 0.05 and abs(norm_form(alpha, ctx)) > 0.05)
    node, cert = blaschke_circle(alpha, ctx)
    assert verify_certificate(node, None, cert).passed


@given(st.integers(0, 2**31 - 1))
def test_doubled_random_psi(seed):
    rng = np.random.default_rng(seed)
    psi = Node(random_matrix(rng, 1, 1, CTX, 0.5) + HtMatrix.eye(1, CTX) * 0.3, random_matrix(rng, 1, 1, CTX),
               random_matrix(rng, 1, 1, CTX), random_matrix(rng, 1, 1, CTX))
    phi = make_phi_from_psi(psi, "line")
    assume(is_minimal(phi))
    cert = doubled_certificate(psi, "line")
    assert max(cert.residuals.values()) < 1e-9
