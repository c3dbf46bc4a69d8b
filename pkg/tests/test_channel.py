import csv

import numpy as np
import pytest

from dcsit_ia.channel import CausalityError, FadingProcess, cn01, make_streams


def test_same_seed_same_draws():
    a, b = FadingProcess(3, 3, seed=7), FadingProcess(3, 3, seed=7)
    for _ in range(5):
        assert a.draw_slot().tobytes() == b.draw_slot().tobytes()


def test_slot_shape():
    assert FadingProcess(4, 4).draw_slot().shape == (4, 4)
    assert FadingProcess(3, 2).draw_slot().shape == (3, 2)


def test_history_is_read_only():
    h = FadingProcess(2, 2).draw_slot()
    with pytest.raises(ValueError):
        h[0, 0] = 1


def test_moments():
    z = cn01(np.random.default_rng(0), 100_000)
    assert abs(z.mean()) <= 0.02
    assert 0.98 <= np.mean(np.abs(z) ** 2) <= 1.02
    assert abs(np.mean(z.real ** 2) - 0.5) < 0.01
    assert abs(np.mean(z * z)) < 0.02  # circular symmetry


def test_streams_are_independent():
    chan1, coeff1, _ = make_streams(3)
    chan2, coeff2, _ = make_streams(3)
    coeff2.random(1000)  # extra draws on the coefficient stream
    assert chan1.random(5).tobytes() == chan2.random(5).tobytes()


def test_csit_view_empty_at_first_slot():
    p = FadingProcess(2, 2)
    assert len(p.csit_view(1)) == 0


def test_csit_view_prefix():
    p = FadingProcess(2, 2)
    hs = [p.draw_slot() for _ in range(5)]
    v = p.csit_view(6)
    assert len(v) == 5
    for t in range(1, 6):
        assert np.array_equal(v.h(t), hs[t - 1])
    with pytest.raises(CausalityError):
        v.h(6)


def test_future_csit_rejected():
    p = FadingProcess(2, 2)
    p.draw_slot()
    with pytest.raises(CausalityError, match="future CSIT requested"):
        p.csit_view(p.current_slot + 2)


def test_view_at_current_slot_hides_it():
    p = FadingProcess(2, 2)
    p.draw_slot()
    p.draw_slot()
    v = p.csit_view(2)
    with pytest.raises(CausalityError):
        v.h(2)


def test_rx_row():
    p = FadingProcess(3, 2)
    h = p.draw_slot()
    assert np.array_equal(p.rx_csi_row(1, 1), h[0])
    with pytest.raises(IndexError):
        p.rx_csi_row(4, 1)
    with pytest.raises(CausalityError):
        p.rx_csi_row(1, 2)


def test_rx_row_matches_delayed_view():
    p = FadingProcess(3, 3, seed=4)
    for _ in range(4):
        p.draw_slot()
    for t in range(1, 5):
        for j in range(1, 4):
            assert np.array_equal(p.rx_csi_row(j, t), p.csit_view(t + 1).h(t)[j - 1])


def test_csv_dump(tmp_path):
    p = FadingProcess(2, 3, seed=1)
    h = p.draw_slot()
    path = tmp_path / "trace.csv"
    p.dump_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "j", "i", "re", "im"]
    assert len(rows) == 1 + 6
    t, j, i, re, im = rows[1 + 3 + 2]  # j=2, i=3
    assert (t, j, i) == ("1", "2", "3")
    assert complex(float(re), float(im)) == h[1, 2]
