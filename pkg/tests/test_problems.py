import numpy as np
import pytest

from mbgf.errors import ConfigError, InvalidInputError, NumericDomainError
from mbgf.problems import (
    Box,
    evaluate,
    get_problem,
    gradients,
    level_set_bound,
    list_problems,
    make_problem,
    register_problem,
)

ALL = ["unbalanced-convex", "strongly-convex", "nonconvex-bounded-grad", "scalar-pair"]


def region_sample(p, rng, k):
    return rng.uniform(p.region.lo, p.region.hi, size=(k, p.region.n))


def fd_gradients(p, x, h=1e-6):
    g = np.zeros((p.m, p.n))
    for j in range(p.n):
        e = np.zeros(p.n)
        e[j] = h
        g[:, j] = (evaluate(p, x + e) - evaluate(p, x - e)) / (2.0 * h)
    return g


def test_registry_lists_builtins():
    assert list_problems() == sorted(ALL)
    with pytest.raises(ConfigError):
        get_problem("no-such-problem")


def test_fixed_values():
    p1 = get_problem("unbalanced-convex")
    assert np.allclose(evaluate(p1, [0.0, 0.0]), [0.0, 1.0])
    g = gradients(p1, [1.0, 1.0])
    assert np.allclose(g[0], [100.0, 1.0])
    assert np.allclose(g[1], [0.0, 0.0])

    p2 = get_problem("strongly-convex")
    assert evaluate(p2, [0.0, 0.0])[0] == 0.0
    assert np.allclose(gradients(p2, [0.0, 0.0])[0], [0.0, 0.0])

    p4 = get_problem("scalar-pair")
    assert np.allclose(evaluate(p4, [2.0]), [9.0, 1.0])
    assert np.allclose(gradients(p4, [2.0])[:, 0], [6.0, 2.0])


def test_evaluate_is_pure():
    for name in ALL:
        p = get_problem(name)
        x = p.starts[0]
        assert np.array_equal(evaluate(p, x), evaluate(p, x))
        assert np.array_equal(gradients(p, x), gradients(p, x))


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(42)
    for name in ALL:
        p = get_problem(name)
        for x in region_sample(p, rng, 100):
            g = gradients(p, x)
            fd = fd_gradients(p, x)
            scale = np.maximum(np.linalg.norm(fd, axis=1), 1.0)
            err = np.linalg.norm(g - fd, axis=1) / scale
            assert err.max() <= 1e-6, (name, x, err.max())


def test_lipschitz_ratios_hold():
    rng = np.random.default_rng(7)
    for name in ALL:
        p = get_problem(name)
        xs = region_sample(p, rng, 200)
        ys = region_sample(p, rng, 200)
        gx = gradients(p, xs)
        gy = gradients(p, ys)
        dist = np.linalg.norm(xs - ys, axis=-1)
        keep = dist > 1e-12
        ratios = np.linalg.norm(gx - gy, axis=-1)[keep] / dist[keep, None]
        assert np.all(ratios <= p.lipschitz * (1.0 + 1e-6)), name


def test_strong_convexity_monotonicity():
    p = get_problem("strongly-convex")
    rng = np.random.default_rng(11)
    xs = region_sample(p, rng, 200)
    ys = region_sample(p, rng, 200)
    gap = gradients(p, xs) - gradients(p, ys)
    d = xs - ys
    inner = np.einsum("kin,kn->ki", gap, d)
    dd = np.einsum("kn,kn->k", d, d)
    assert np.all(inner >= p.strong_convexity * dd[:, None] - 1e-12)


def test_midpoint_convexity_of_convex_problems():
    rng = np.random.default_rng(13)
    for name in ("unbalanced-convex", "strongly-convex"):
        p = get_problem(name)
        xs = region_sample(p, rng, 200)
        ys = region_sample(p, rng, 200)
        mid = evaluate(p, 0.5 * (xs + ys))
        avg = 0.5 * (evaluate(p, xs) + evaluate(p, ys))
        assert np.all(mid <= avg + 1e-10), name


def test_nonconvex_problem_violates_midpoint_convexity():
    p = get_problem("nonconvex-bounded-grad")
    x = np.array([5.3, 0.0])
    y = np.array([5.7, 0.0])
    mid = evaluate(p, 0.5 * (x + y))[0]
    avg = 0.5 * (evaluate(p, x)[0] + evaluate(p, y)[0])
    assert mid > avg + 1e-6


def test_nonconvex_metadata():
    p = get_problem("nonconvex-bounded-grad")
    # inf f_i = 0 attained at the centers.
    assert np.allclose(evaluate(p, [0.0, 0.0])[0], 0.0, atol=1e-14)
    assert np.allclose(evaluate(p, [2.0, 1.0])[1], 0.0, atol=1e-14)
    rng = np.random.default_rng(5)
    xs = rng.uniform(-30.0, 30.0, size=(20000, 2))
    f = evaluate(p, xs)
    assert f.min() >= 0.0
    norms = np.linalg.norm(gradients(p, xs), axis=-1)
    assert norms.max() <= p.grad_bound + 1e-12


def test_region_contains_shipped_start_level_sets():
    for name in ALL:
        p = get_problem(name)
        for x0 in p.starts:
            lsb = level_set_bound(p, evaluate(p, x0))
            assert np.all(lsb.box.lo >= p.region.lo - 1e-12), name
            assert np.all(lsb.box.hi <= p.region.hi + 1e-12), name


def test_level_set_bound_ball_example():
    ball = make_problem(
        "unit-ball", 2, 1,
        lambda x: 0.5 * (x * x).sum(axis=-1, keepdims=True),
        lambda x: x[..., None, :],
        lipschitz=[1.0], lower_bounds=[0.0], convexity_class="convex",
        region=Box([-3.0, -3.0], [3.0, 3.0]), grad_bound=float(np.sqrt(18.0)),
        starts=[[1.0, 1.0]],
        level_set_bound=None,
    )
    # No analytic closure: fallback is the declared region.
    lsb = ball.level_set_bound([2.0])
    assert lsb.radius == pytest.approx(np.sqrt(18.0))

    def analytic(a):
        from mbgf.problems import LevelSetBound
        r = float(np.sqrt(2.0 * a[0]))
        return LevelSetBound(a, r, Box([-r, -r], [r, r]))

    ball2 = make_problem(
        "unit-ball-2", 2, 1,
        lambda x: 0.5 * (x * x).sum(axis=-1, keepdims=True),
        lambda x: x[..., None, :],
        lipschitz=[1.0], lower_bounds=[0.0], convexity_class="convex",
        region=Box([-3.0, -3.0], [3.0, 3.0]), grad_bound=float(np.sqrt(18.0)),
        starts=[[1.0, 1.0]], level_set_bound=analytic,
    )
    assert ball2.level_set_bound([2.0]).radius == pytest.approx(2.0)


def test_level_set_bound_by_rejection_sampling():
    rng = np.random.default_rng(23)
    for name in ALL:
        p = get_problem(name)
        x0 = p.starts[-1]
        a = evaluate(p, x0)
        lsb = level_set_bound(p, a)
        xs = region_sample(p, rng, 20000)
        inside = np.all(evaluate(p, xs) <= a + 1e-12, axis=-1)
        pts = xs[inside]
        assert pts.size > 0
        assert np.all(np.linalg.norm(pts, axis=-1) <= lsb.radius + 1e-9), name
        assert np.all(pts >= lsb.box.lo - 1e-9) and np.all(pts <= lsb.box.hi + 1e-9), name


def test_level_set_bound_monotone_in_level():
    p = get_problem("strongly-convex")
    a = evaluate(p, p.starts[0])
    big = level_set_bound(p, a)
    small = level_set_bound(p, 0.5 * a)
    assert small.radius <= big.radius + 1e-12


def test_vectorized_shapes():
    p = get_problem("unbalanced-convex")
    xs = np.zeros((7, 2))
    assert evaluate(p, xs).shape == (7, 2)
    assert gradients(p, xs).shape == (7, 2, 2)
    p4 = get_problem("scalar-pair")
    assert evaluate(p4, np.zeros((5, 1))).shape == (5, 2)
    assert gradients(p4, np.zeros((5, 1))).shape == (5, 2, 1)
    assert evaluate(p4, 2.0).shape == (2,)


def test_error_paths():
    p = get_problem("strongly-convex")
    with pytest.raises(InvalidInputError):
        evaluate(p, [np.nan, 0.0])
    with pytest.raises(InvalidInputError):
        evaluate(p, [1.0, 2.0, 3.0])
    with pytest.raises(InvalidInputError):
        level_set_bound(p, [-1.0, 1.0])

    bad = make_problem(
        "explodes", 1, 1,
        lambda x: np.full(x.shape[:-1] + (1,), np.inf),
        lambda x: x[..., None, :],
        lipschitz=[1.0], lower_bounds=[0.0], convexity_class="convex",
        region=Box([-1.0], [1.0]), grad_bound=1.0, starts=[[0.0]],
    )
    with pytest.raises(NumericDomainError):
        evaluate(bad, [0.5])


def test_register_plugin_roundtrip():
    name = register_problem(lambda: make_problem(
        "plugin-demo", 1, 1,
        lambda x: (x * x).sum(axis=-1, keepdims=True),
        lambda x: 2.0 * x[..., None, :],
        lipschitz=[2.0], lower_bounds=[0.0], convexity_class="convex",
        region=Box([-1.0], [1.0]), grad_bound=2.0, starts=[[0.5]],
    ))
    assert name in list_problems()
    q = get_problem(name)
    assert np.allclose(evaluate(q, [0.5]), [0.25])
