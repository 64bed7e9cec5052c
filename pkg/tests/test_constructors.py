import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import random_matrix, random_scalar, scalars
from scaledquat import examples as ex
from scaledquat.constructors import (SeriesHt, bb_closed_form, blaschke_circle, blaschke_circle_series,
                                     blaschke_line, blaschke_line_pair, brune_section, node_series,
                                     spectral_radius, star_eval, star_product, stein_solve, theta_alt_eval,
                                     theta_builder, theta_identities, theta_one_closed_form)
from scaledquat.core import ONE, ZERO, AlgebraContext, HtScalar, I, J, conj_star, invert, mul, norm_form
from scaledquat.errors import (DegenerateAlpha, DegeneratePair, GramSingular, PreconditionViolated,
                               SpectralRadiusTooLarge, UnimodularAlpha)
from scaledquat.matrix import HtMatrix, is_star_symmetric
from scaledquat.realization import evaluate
from scaledquat.structured import verify_certificate

CTX = AlgebraContext(-1.0)
q = ex.quaternion


def scalar_value(node, x):
    return evaluate(node, x)[0, 0]


def test_line_blaschke_alpha_two():
    node, cert = blaschke_line(q(2.0), CTX)
    assert cert.H[0, 0].is_close(HtScalar.real(-0.25), 0)
    for x in (0.1, -0.3):
        assert scalar_value(node, x).is_close(HtScalar.real((1 + 2 * x) / (1 - 2 * x)), 1e-12)


def test_line_blaschke_formula_quaternion():
    alpha = q(1.0, 0, 1.0, 0)
    node, cert = blaschke_line(alpha, CTX)
    assert verify_certificate(node, None, cert).max_residual < 1e-9
    x = 0.2
    want = mul(ONE + conj_star(alpha) * x, invert(ONE - alpha * x, CTX), CTX)
    assert scalar_value(node, x).is_close(want, 1e-12)


def test_line_blaschke_degenerate():
    with pytest.raises(DegenerateAlpha):
        blaschke_line(I, CTX)


def test_line_pair():
    alpha, beta = q(0.5, 0.3, 0.2, -0.1), q(0.7, -0.2, 0.1, 0.4)
    node, cert, sig = blaschke_line_pair(alpha, beta, CTX)
    J2 = sig.J
    for x in (0.1, 0.25):
        R = evaluate(node, x)
        assert (R @ J2 @ evaluate(node, -x).star()).is_close(J2, 1e-10)
        d0 = mul(ONE + conj_star(beta) * x, invert(ONE - alpha * x, CTX), CTX)
        d1 = mul(invert(ONE - beta * x, CTX), ONE + conj_star(alpha) * x, CTX)
        assert R[0, 0].is_close(d0, 1e-10) and R[1, 1].is_close(d1, 1e-10)
        assert abs(R[0, 1].a) + abs(R[0, 1].b) < 1e-12
    assert verify_certificate(node, None, cert).passed


def test_line_pair_conjugate_variant():
    beta = q(0.6, 0.1, -0.3, 0.2)
    node, cert, sig = blaschke_line_pair(conj_star(beta), beta, CTX)
    x = 0.2
    R = evaluate(node, x)
    d0 = mul(ONE + conj_star(beta) * x, invert(ONE - conj_star(beta) * x, CTX), CTX)
    assert R[0, 0].is_close(d0, 1e-10)
    assert verify_certificate(node, None, cert).passed


def test_line_pair_degenerate():
    beta = q(0.6, 0.1, -0.3, 0.2)
    with pytest.raises(DegeneratePair):
        blaschke_line_pair(-conj_star(beta), beta, CTX)


def test_brune_section():
    node, cert, sig = brune_section(J, ONE, ONE, 1.0, CTX)
    rep = verify_certificate(node, sig.J, cert)
    assert rep.passed and rep.max_residual < 1e-9
    assert (node.C.star() @ sig.J @ node.C).norm() < 1e-14
    with pytest.raises(PreconditionViolated):
        brune_section(q(0.5), ONE, ONE, 1.0, CTX)
    with pytest.raises(PreconditionViolated):
        brune_section(J, ONE, q(2.0), 1.0, CTX)


def test_circle_blaschke_values():
    node, cert = blaschke_circle(ZERO, CTX)
    assert cert.H[0, 0].is_close(ONE, 0)
    assert scalar_value(node, 0.3).is_close(HtScalar.real(0.3), 1e-14)
    node, cert = blaschke_circle(q(0.5), CTX)
    assert cert.H[0, 0].is_close(HtScalar.real(0.75), 1e-15)
    for x in (0.2, -0.4):
        assert scalar_value(node, x).is_close(HtScalar.real((x - 0.5) / (1 - x / 2)), 1e-12)


def test_circle_blaschke_split_quaternions():
    ctx = AlgebraContext(1.0)
    with pytest.raises(UnimodularAlpha):
        blaschke_circle(HtScalar(1.0, 0.0), ctx)
    node, cert = blaschke_circle(q(0.3, 0.2, 0.4, -0.1), ctx)
    assert verify_certificate(node, None, cert).passed


def test_stein_simple_cases(rng):
    C = random_matrix(rng, 2, 3, CTX)
    gs = stein_solve(HtMatrix.zeros(3, 3, CTX), C)
    assert gs.G.is_close(C.star() @ C, 1e-12)
    alpha = q(0.4, 0.3, -0.2, 0.1)
    gs = stein_solve(HtMatrix.scalar(conj_star(alpha), CTX), HtMatrix.eye(1, CTX))
    want = 1.0 / (1.0 - norm_form(alpha, CTX))
    assert gs.G[0, 0].is_close(HtScalar.real(want), 1e-12)


def test_stein_series_oracle(rng):
    for t in (-1.0, 0.5):
        ctx = AlgebraContext(t)
        A = random_matrix(rng, 3, 3, ctx)
        A = A * (0.6 / spectral_radius(A))
        gs = stein_solve(A, random_matrix(rng, 1, 3, ctx))
        assert gs.discrepancy < 1e-8
        assert (gs.G - gs.G.star()).norm() < 1e-10


def test_stein_unstable():
    with pytest.raises(SpectralRadiusTooLarge):
        stein_solve(HtMatrix.real([[1.5]], CTX), HtMatrix.eye(1, CTX))


def test_theta_n1_real_half():
    node, cert = theta_builder([q(0.5)], CTX)
    for x in (0.1, -0.3, 0.6):
        assert scalar_value(node, x).is_close(HtScalar.real((x - 0.5) / (1 - x / 2)), 1e-12)


def test_theta_n1_zero():
    node, _ = theta_builder([ZERO], CTX)
    assert scalar_value(node, 0.37).is_close(HtScalar.real(0.37), 1e-14)


def test_theta_n1_closed_form(rng):
    for t in (-1.0, 0.5):
        ctx = AlgebraContext(t)
        alpha = q(0.3, -0.2, 0.25, 0.1)
        node, _ = theta_builder([alpha], ctx)
        for x in (0.2, -0.5):
            want = theta_one_closed_form(conj_star(alpha), x, ctx)
            assert scalar_value(node, x).is_close(want, 1e-12)


def test_theta_n3_identities_and_alt_form():
    for t in (-1.0, 0.5):
        ctx = AlgebraContext(t)
        alphas = [q(0.3, 0.1, 0.2, 0.0), q(-0.2, 0.3, 0.0, 0.1), q(0.1, -0.4, 0.1, 0.2)]
        node, cert = theta_builder(alphas, ctx)
        assert max(theta_identities(node, cert.H).values()) < 1e-8
        assert verify_certificate(node, None, cert).passed
        for x in (0.1, -0.4, 0.7):
            R = evaluate(node, x)
            assert (theta_alt_eval(node, cert.H, x) - R).norm() < 1e-9 * max(1.0, R.norm())


def test_theta_repeated_alphas():
    with pytest.raises(GramSingular):
        theta_builder([q(0.3, 0.1), q(0.3, 0.1)], CTX)


def test_star_product_basics(rng):
    g = SeriesHt([random_scalar(rng) for _ in range(5)], CTX)
    one = SeriesHt([ONE] + [ZERO] * 4, CTX)
    assert star_product(one, g).is_close(g, 0)
    xj = SeriesHt([ZERO, J], CTX)
    sq = star_product(SeriesHt([ZERO, J, ZERO], CTX), SeriesHt([ZERO, J, ZERO], CTX))
    assert sq[2].is_close(HtScalar.real(CTX.t), 0) and sq[1].is_close(ZERO, 0)
    assert xj.order == 1


def test_star_eval_places_powers_right():
    ctx = AlgebraContext(-1.0)
    f = SeriesHt([ZERO, J], ctx)
    assert star_eval(f, I).is_close(mul(J, I, ctx), 0)


def test_node_series_matches_evaluation():
    node, _ = blaschke_circle(q(0.3, 0.2, -0.25, 0.1), CTX)
    s = node_series(node, 64)
    x = 0.3
    assert star_eval(s, HtScalar.real(x)).is_close(scalar_value(node, x), 1e-12)


def test_bb_closed_form():
    for t in (-1.0, 0.5):
        ctx = AlgebraContext(t)
        alpha = q(0.3, 0.2, -0.25, 0.1)
        h = star_product(blaschke_circle_series(alpha, ctx), blaschke_circle_series(conj_star(alpha), ctx))
        for pt in (q(0.1, 0.2, 0.05, -0.1), q(-0.2, 0.0, 0.1, 0.1), HtScalar.real(0.25)):
            v = star_eval(h, pt)
            assert v.is_close(bb_closed_form(alpha, pt, ctx), 1e-6)


# properties ------------------------------------------------------------------

series = st.lists(scalars(st.floats(-2, 2)), min_size=1, max_size=6)


@given(series, series, series)
def test_star_product_associative(f, g, h):
    F, G, Hs = (SeriesHt(s, CTX) for s in (f, g, h))
    L, R = star_product(star_product(F, G), Hs), star_product(F, star_product(G, Hs))
    assert L.order == R.order
    assert L.is_close(R, 1e-9)


@given(series, series, series)
def test_star_product_distributes(f, g, h):
    F, G, Hs = (SeriesHt(s, CTX) for s in (f, g, h))
    assert star_product(F, G + Hs).is_close(star_product(F, G) + star_product(F, Hs), 1e-9)


@given(scalars(st.floats(-0.6, 0.6)), st.sampled_from([-1.0, 0.5]))
def test_circle_blaschke_always_verifies(alpha, t):
    ctx = AlgebraContext(t)
    n = norm_form(alpha, ctx)
    assume(abs(1 - n) > 0.05 and abs(n) > 0.05)
    node, cert = blaschke_circle(alpha, ctx)
    rep = verify_certificate(node, None, cert)
    assert rep.passed and rep.max_residual < 1e-8


@given(st.integers(0, 2**31 - 1))
def test_stein_symmetric(seed):
    rng = np.random.default_rng(seed)
    A = random_matrix(rng, 2, 2, CTX)
    A = A * (0.8 / max(spectral_radius(A), 1e-3))
    gs = stein_solve(A, random_matrix(rng, 1, 2, CTX))
    assert is_star_symmetric(gs.G, 1e-10)
