import numpy as np
import pytest

from zakharov_trig import (
    Field,
    ReferenceMismatchError,
    SolitonParams,
    TorusGrid,
    build_example1_reference,
    conservation_run,
    convergence_study,
    csv_export,
    fit_order,
    init_state,
    read_table,
    snapshot_export,
    soliton_exact,
)
from zakharov_trig.harness import (
    CONVERGENCE_HEADER,
    MAGIC,
    RUN_HEADER,
    SNAPSHOT_HEADER,
)

TAUS = (4e-3, 2e-3, 1e-3, 5e-4)


class TestFitOrder:
    def test_exact_line(self):
        fit = fit_order([(0.1, 0.1), (0.05, 0.05)])
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)

    def test_exact_quadratic(self):
        fit = fit_order([(0.1, 0.01), (0.05, 0.0025)])
        assert fit.slope == pytest.approx(2.0, abs=1e-12)

    def test_floor_rows_excluded(self):
        fit = fit_order([(0.1, 0.1), (0.05, 0.05), (0.025, 1e-16)])
        assert fit.excluded == [(0.025, 1e-16)]
        assert fit.slope == pytest.approx(1.0, abs=1e-12)

    def test_too_few_usable_rows(self):
        with pytest.raises(ValueError):
            fit_order([(0.1, 1e-16), (0.05, 1e-17)])


class TestConvergenceStudyValidation:
    def test_rejects_duplicate_taus(self):
        with pytest.raises(ValueError, match="distinct"):
            convergence_study("first", "soliton", [1e-3] * 4, 128, 20 * np.pi, 1.0)

    def test_rejects_short_tau_list(self):
        with pytest.raises(ValueError, match="4"):
            convergence_study("first", "soliton", [1e-3, 5e-4], 128, 20 * np.pi, 1.0)

    def test_rejects_non_divisor(self):
        with pytest.raises(ValueError, match="divide"):
            convergence_study(
                "first", "soliton", [3e-3, 2e-3, 1e-3, 5e-4], 128, 20 * np.pi, 1.0
            )

    def test_rejects_unknown_problem(self):
        with pytest.raises(ValueError, match="problem"):
            convergence_study("first", "nope", TAUS, 128, 20 * np.pi, 1.0)


class TestConvergenceRatios:
    def test_first_order_halving_at_spec_parameters(self):
        rec = convergence_study("first", "soliton", TAUS, 512, 20 * np.pi, 1.0)
        errs = [row[4] for row in rec.rows]
        for a, b in zip(errs, errs[1:]):
            assert 1.6 <= a / b <= 2.4

    def test_second_order_halving_on_clean_domain(self):
        # L = 40*pi: sampled soliton tails at rounding level, so the pure
        # O(tau^2) behaviour is visible (see ledger re: L = 20*pi floor)
        rec = convergence_study("second", "soliton", TAUS, 512, 40 * np.pi, 1.0)
        errs = [row[4] for row in rec.rows]
        for a, b in zip(errs, errs[1:]):
            assert 3.2 <= a / b <= 4.8

    def test_second_order_slope_on_clean_domain(self):
        rec = convergence_study("second", "soliton", TAUS, 512, 40 * np.pi, 1.0)
        fit = fit_order(rec.tau_error_pairs())
        assert 1.75 <= fit.slope <= 2.25

    def test_record_is_self_describing(self):
        rec = convergence_study("first", "soliton", TAUS, 128, 20 * np.pi, 1.0)
        for key in ("scheme", "problem", "K", "L", "T", "s", "B", "C"):
            assert key in rec.params
        taus = [row[0] for row in rec.rows]
        assert taus == sorted(taus, reverse=True)


class TestExample1Reference:
    def test_mismatch_aborts(self):
        # a coarse cross-check step cannot agree with the oracle to 1e-7
        grid = TorusGrid(2 * np.pi, 64)
        with pytest.raises(ReferenceMismatchError):
            build_example1_reference(grid, 0.1, 2.5e-3)

    def test_agreement_recorded(self):
        grid = TorusGrid(2 * np.pi, 64)
        ref, meta = build_example1_reference(grid, 0.02, 1e-4)
        assert meta["reference_agreement"] <= 1e-7
        assert meta["tau_ref"] <= rk4_limit(grid)


def rk4_limit(grid):
    return 0.5 * grid.dx**2


class TestConservationRun:
    def test_zero_data_impossible_soliton(self):
        # conservation_run on zero-amplitude data: emulate via linear_only
        rec = conservation_run(
            "first", "soliton", 3.2, 128, 20 * np.pi, 2.0, linear_only=True
        )
        rows = np.array(rec.rows)
        assert np.max(np.abs(rows[:, 3])) < 1e-12  # dev_l2 of unitary flow

    def test_cfl_arithmetic(self):
        rec = conservation_run("first", "soliton", 3.2, 512, 20 * np.pi, 20.0)
        # dx = 20*pi/512 -> nominal tau = 3.2*dx^2 = 0.04820, snapped to T/415
        assert rec.params["tau"] == pytest.approx(0.0482, abs=2e-4)
        assert rec.params["CFL"] == pytest.approx(3.2, rel=1e-2)
        t = np.array(rec.rows)[:, 0]
        assert np.all(np.diff(t) > 0)
        assert t[-1] == pytest.approx(20.0, abs=1e-9)

    def test_bitwise_deterministic(self, tmp_path):
        kwargs = dict(sample_every=5)
        r1 = conservation_run("second", "soliton", 5.0, 128, 20 * np.pi, 2.0, **kwargs)
        r2 = conservation_run("second", "soliton", 5.0, 128, 20 * np.pi, 2.0, **kwargs)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        csv_export(r1, p1)
        csv_export(r2, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestCsv:
    def test_convergence_round_trip(self, tmp_path):
        rec = convergence_study("first", "soliton", TAUS, 128, 20 * np.pi, 1.0)
        path = tmp_path / "conv.csv"
        csv_export(rec, path)
        text = path.read_text().splitlines()
        assert text[0] == MAGIC
        assert text[1].startswith("# params: ")
        assert text[2] == CONVERGENCE_HEADER
        params, header, cols = read_table(path)
        assert header == CONVERGENCE_HEADER.split(",")
        np.testing.assert_array_equal(cols["tau"], [r[0] for r in rec.rows])
        # all written digits survive the round trip
        np.testing.assert_array_equal(cols["err_composite"], [r[4] for r in rec.rows])

    def test_run_schema(self, tmp_path):
        rec = conservation_run("first", "soliton", 5.0, 128, 20 * np.pi, 1.0)
        path = tmp_path / "run.csv"
        csv_export(rec, path)
        assert path.read_text().splitlines()[2] == RUN_HEADER

    def test_empty_record_header_only(self, tmp_path):
        from zakharov_trig.harness import ConvergenceRecord

        rec = ConvergenceRecord("first", "soliton", 0.0, {"K": 8}, [])
        path = tmp_path / "empty.csv"
        csv_export(rec, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        params, header, cols = read_table(path)
        assert cols["tau"].size == 0

    def test_snapshot_schema_and_peak(self, tmp_path):
        p = SolitonParams()
        g = TorusGrid(20 * np.pi, 256)
        st = init_state(*soliton_exact(p, g, 0.0), "first", 0.1)
        path = tmp_path / "snap.csv"
        snapshot_export(st, path)
        lines = path.read_text().splitlines()
        assert lines[2] == SNAPSHOT_HEADER
        params, header, cols = read_table(path)
        assert np.max(cols["abs_E"]) == pytest.approx(p.amplitude, rel=1e-10)
        assert params["scheme"] == "first"

    def test_magic_line_enforced(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,l2\n0,1\n")
        with pytest.raises(ValueError, match="magic"):
            read_table(path)
