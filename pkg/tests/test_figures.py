import numpy as np

from bregprox.figures import tangency_scan
from bregprox.kernels import ball_example_kernel, make_kernel
from bregprox.objectives import curved_example


def test_matched_kernel_ball_touches_without_crossing():
    h, _, _ = curved_example()
    scan = tangency_scan(ball_example_kernel(), h, np.zeros(2),
                         np.array([0.0, -1.0]), lam=0.2)
    assert scan["passed"]
    assert scan["min_gap"] >= -1e-9
    assert abs(scan["min_gap_at"]) <= 0.02


def test_euclidean_ball_penetrates_the_dent():
    h, _, _ = curved_example()
    scan = tangency_scan(make_kernel("half_squared_norm", dim=2), h,
                         np.zeros(2), np.array([0.0, -1.0]), lam=0.2)
    assert not scan["passed"]
    assert scan["min_gap"] < -1e-3


def test_large_step_breaks_tangency_even_for_matched_kernel():
    # beyond the modulus threshold the matched ball crosses the graph too
    h, _, _ = curved_example()
    scan = tangency_scan(ball_example_kernel(), h, np.zeros(2),
                         np.array([0.0, -1.0]), lam=1.0)
    assert not scan["passed"]


def test_rows_cover_the_requested_window():
    h, _, _ = curved_example()
    scan = tangency_scan(ball_example_kernel(), h, np.zeros(2),
                         np.array([0.0, -1.0]), lam=0.2, width=0.3, n=100)
    xs = np.array([r[0] for r in scan["rows"]])
    assert xs.min() >= -0.3 - 1e-12 and xs.max() <= 0.3 + 1e-12
    # ball extent columns bracket the graph column wherever the gap column
    # says they do
    for x1, bot, top, hv, gap in scan["rows"]:
        assert np.isclose(gap, hv - top)
        assert bot <= top
