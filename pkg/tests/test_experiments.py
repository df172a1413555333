import math

import numpy as np
import pytest

from bufdstc.config import SimConfig
from bufdstc.experiments import (
    batch_means_se,
    run_ber_sweep,
    run_buffer_size_sweep,
    run_delay_experiment,
    run_point,
    snr_buffer_sizes,
)


def tie_tol(a, b):
    return 2 * math.sqrt(a.ber_se**2 + b.ber_se**2)


def test_sweep_row_count_and_symbols():
    cfg = SimConfig(M=20, packets=30, snr_min=0, snr_max=8, snr_step=4)
    res = run_ber_sweep(cfg)
    assert len(res) == 3
    assert list(res.column("snr_db")) == [0, 4, 8]
    for row in res.rows:
        assert row.symbols_counted == 30 * 20 * 3
        assert 0 <= row.ber <= 0.5
        assert row.pairs_examined_mean == 15


def test_parallel_sweep_matches_serial():
    cfg = SimConfig(M=10, packets=20, snr_min=0, snr_max=4, snr_step=4)
    a = run_ber_sweep(cfg)
    b = run_ber_sweep(cfg, workers=2)
    assert [r.row() for r in a.rows] == [r.row() for r in b.rows]


def test_single_user_bound():
    base = SimConfig(M=100, seed=3, snr_min=0, snr_max=12, snr_step=4)
    single = run_ber_sweep(base.replace(K=1, packets=2010))
    multi = run_ber_sweep(base.replace(K=3, packets=670))
    for s, m in zip(single.rows, multi.rows):
        assert s.symbols_counted >= 2 * 10**5 and m.symbols_counted >= 2 * 10**5
        assert s.ber <= m.ber


def test_exhaustive_beats_random_at_10db():
    base = SimConfig(M=100, packets=1000, seed=2)
    ex = run_point(base, 10.0)
    rnd = run_point(base.replace(selection="random"), 10.0)
    assert ex.ber < rnd.ber


def test_ber_non_increasing_in_snr():
    res = run_ber_sweep(SimConfig(M=100, packets=700, seed=4, snr_min=0, snr_max=16, snr_step=4))
    for a, b in zip(res.rows, res.rows[1:]):
        assert b.ber <= a.ber + tie_tol(a, b)


def test_buffer_sweep_rows_and_minimal_buffer():
    base = SimConfig(M=20, packets=40)
    res = run_buffer_size_sweep(base, [1, 2, 4, 6, 8], snr_db=15.0)
    assert len(res) == 5
    assert list(res.column("mean_buffer_size")) == [1, 2, 4, 6, 8]
    # one slot per relay: a pair that received must forward before it can receive again
    j1 = res.rows[0]
    assert j1.delay_stats.P_GJ + j1.delay_stats.P_G0 == 1.0


def test_snr_driven_sizes():
    cfg = SimConfig(buffer_mode="snr", J=8, snr_min=0, snr_max=10, snr_step=2)
    assert snr_buffer_sizes(cfg, cfg.snr_points()) == [8, 6, 4, 2, 1, 1]
    assert snr_buffer_sizes(SimConfig(J=5), [0, 2, 4]) == [5, 5, 5]


def test_delay_experiment_rows():
    cfg = SimConfig(M=10, J=8, buffer_mode="snr", snr_min=6, snr_max=10)
    cmp = run_delay_experiment(cfg, [0, 20, 40, 80])
    for res in (cmp.primary, cmp.fixed):
        assert len(res) == 4
        assert res.rows[0].avg_delay_epochs == 0.0 and res.rows[0].symbols_counted == 0
        assert np.all(np.diff(res.column("avg_delay_epochs")) > 0)
    assert cmp.primary.rows[1].mean_buffer_size == 4
    assert cmp.fixed.rows[1].mean_buffer_size == 8


def test_batch_means():
    assert math.isnan(batch_means_se([(1, 10)]))
    data = [(1, 10)] * 40
    assert batch_means_se(data) == pytest.approx(0.0, abs=1e-15)
