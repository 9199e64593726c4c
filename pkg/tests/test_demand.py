import json
import math
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lh2airport.demand import (
    LH2_THRESHOLDS,
    ConversionConstants,
    FlightRecord,
    FuelModel,
    GseScenarioTable,
    ShareSelector,
    destination,
    eligibility,
    flight_demand,
    great_circle_km,
    hourly_series,
    jet_fuel_burn,
    lh2_mass,
    read_schedule,
    synthetic_schedule,
    write_schedule,
)

RATIO = 42.80 / 119.93 * 1.10


class TestGeometry:
    def test_identical_points(self):
        assert great_circle_km(52.3, 4.76, 52.3, 4.76) == 0.0

    def test_quarter_circumference(self):
        assert great_circle_km(0.0, 0.0, 0.0, 90.0) == pytest.approx(10007.5, rel=1e-3)
        assert great_circle_km(0.0, 0.0, 0.0, 90.0) == pytest.approx(math.pi / 2 * 6371.0, rel=1e-12)

    def test_antipodes_and_tiny_separations(self):
        assert great_circle_km(10.0, 20.0, -10.0, -160.0) == pytest.approx(math.pi * 6371.0, rel=1e-9)
        # 1e-6 degree of latitude is about 11 cm
        assert great_circle_km(0.0, 0.0, 1e-6, 0.0) == pytest.approx(6371.0 * math.radians(1e-6), rel=1e-6)

    @given(st.floats(-90, 90), st.floats(-180, 180), st.floats(-90, 90), st.floats(-180, 180))
    def test_symmetry(self, a, b, c, d):
        assert great_circle_km(a, b, c, d) == pytest.approx(great_circle_km(c, d, a, b), abs=1e-6)

    @given(st.floats(-60, 60), st.floats(-180, 180), st.floats(0, 360), st.floats(1, 15000))
    def test_destination_roundtrip(self, lat, lon, bearing, d):
        lat2, lon2 = destination(lat, lon, bearing, d)
        assert great_circle_km(lat, lon, lat2, lon2) == pytest.approx(d, rel=1e-6, abs=1e-6)


class TestFuel:
    def test_conversion_example(self):
        assert lh2_mass(1000.0) == pytest.approx(392.57, abs=0.01)
        assert lh2_mass(0.0) == 0.0

    @given(st.floats(0.0, 1e6))
    def test_conversion_linear(self, m):
        assert lh2_mass(2 * m) == pytest.approx(2 * lh2_mass(m), rel=1e-12, abs=1e-12)
        if m > 1e-6:
            # the rounded constant 0.39257 differs from the closed form by 7.7e-6
            assert lh2_mass(m) / m == pytest.approx(0.39257, abs=1e-5)
            assert lh2_mass(m) / m == pytest.approx(RATIO, rel=1e-12)

    def test_reference_burn(self):
        ref = json.loads(resources.files("lh2airport.demand").joinpath("data/fuel_model.json").read_text())
        r = ref["reference"]
        assert jet_fuel_burn(r["distance_km"], r["class"]) == pytest.approx(r["burn_kg"], abs=0.05)
        assert jet_fuel_burn(926.0, "regional") == pytest.approx(1631.6, abs=0.05)

    def test_zero_distance_is_reserve(self):
        model = FuelModel.load()
        for cls, c in model.coefficients.items():
            assert jet_fuel_burn(0.0, cls, model) == c["reserve"]

    @given(st.sampled_from(["regional", "single-aisle", "medium", "long"]), st.floats(0, 1e4), st.floats(1, 1e3))
    def test_monotone(self, cls, d, dd):
        assert jet_fuel_burn(d + dd, cls) > jet_fuel_burn(d, cls)

    def test_unknown_class(self):
        with pytest.raises(KeyError):
            jet_fuel_burn(100.0, "blimp")

    def test_negative_inputs(self):
        with pytest.raises(ValueError):
            jet_fuel_burn(-1.0, "regional")
        with pytest.raises(ValueError):
            lh2_mass(-1.0)


class TestEligibility:
    def test_cutoff(self):
        far = destination(52.3086, 4.7639, 90.0, 2500 * 1.852)
        f = FlightRecord(10.0, far[0], far[1], "single-aisle")
        assert not eligibility(f)

    def test_zero_distance_selected(self):
        f = FlightRecord(10.0, 52.3086, 4.7639, "regional")
        assert eligibility(f, selector=ShareSelector({"regional": 0.6}))

    def test_wide_bodies_never_eligible(self):
        f = FlightRecord(10.0, 52.0, 5.0, "medium")
        assert not eligibility(f)

    @pytest.mark.parametrize("cls,share", [("regional", 0.6), ("single-aisle", 0.5)])
    def test_share_over_large_schedule(self, cls, share):
        lat, lon = destination(52.3086, 4.7639, 45.0, 400 * 1.852)
        flights = [FlightRecord(12.0, lat, lon, cls) for _ in range(2000)]
        sel = ShareSelector({cls: share})
        det = np.mean([eligibility(f, selector=sel) for f in flights])
        assert det == pytest.approx(share, abs=0.02)
        sel = ShareSelector({cls: share}, rng=np.random.default_rng(1))
        rnd = np.mean([eligibility(f, selector=sel) for f in flights])
        assert rnd == pytest.approx(share, abs=0.02)

    def test_record_validation(self):
        with pytest.raises(ValueError):
            FlightRecord(25.0, 0.0, 0.0, "regional")
        with pytest.raises(ValueError):
            FlightRecord(1.0, 91.0, 0.0, "regional")
        with pytest.raises(ValueError):
            FlightRecord(1.0, 0.0, 181.0, "regional")
        with pytest.raises(ValueError):
            FlightRecord(1.0, 0.0, 0.0, "glider")

    def test_constants_validation(self):
        with pytest.raises(ValueError):
            ConversionConstants(shares={"regional": 1.5})
        with pytest.raises(ValueError):
            ConversionConstants(lhv_lh2=0.0)


class TestSeries:
    def test_single_flight_bucket(self):
        # burn chosen so the flight needs exactly 1 t of LH2
        model = FuelModel({"regional": {"reserve": 1000.0 / RATIO, "a": 0.0, "b": 0.0}})
        f = FlightRecord(7 + 10 / 60, 52.3086, 4.7639, "regional")
        res = hourly_series([f], constants=ConversionConstants(shares={"regional": 1.0}), fuel_model=model)
        assert res["lh2_t"][7] == pytest.approx(1.0)
        assert np.sum(np.delete(res["lh2_t"], 7)) == 0.0

    def test_empty_schedule(self):
        res = hourly_series([])
        assert res["lh2_t"].sum() == 0.0 and res["gh2_kg"].sum() == 0.0
        assert res["flights"] == []

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_bucketing_conserves_totals(self, seed):
        flights = synthetic_schedule(seed=seed, departures=300)
        res = hourly_series(flights)
        per = flight_demand(flights)
        assert res["lh2_t"].sum() * 1000.0 == pytest.approx(sum(r["lh2_kg"] for r in per), rel=1e-12)
        assert res["gh2_kg"].sum() == pytest.approx(sum(r["gh2_kg"] for r in per), rel=1e-12)
        assert res["distance_hist"][1].sum() == len(flights)

    @pytest.mark.parametrize("seed", [0, 5, 11])
    def test_shares_monotone(self, seed):
        shares = hourly_series(synthetic_schedule(seed=seed))["shares"]
        vals = [shares[t] for t in sorted(LH2_THRESHOLDS)]
        assert vals == sorted(vals)

    def test_gse_scenario_ratio(self):
        flights = synthetic_schedule()
        med = hourly_series(flights, scenario="medium")["gh2_kg"].sum()
        high = hourly_series(flights, scenario="high")["gh2_kg"].sum()
        low = hourly_series(flights, scenario="low")["gh2_kg"].sum()
        assert low < med < high
        assert high / med == pytest.approx(5.0, rel=0.2)

    def test_gse_table_ordering_enforced(self):
        with pytest.raises(ValueError):
            GseScenarioTable({"regional": {"low": 2.0, "medium": 1.0, "high": 3.0}})
        with pytest.raises(KeyError):
            GseScenarioTable.load().demand("regional", "extreme")

    def test_default_schedule_scale(self):
        # frozen from the seed-0 synthetic schedule with the bundled coefficient files
        res = hourly_series(synthetic_schedule())
        assert res["lh2_t"].sum() == pytest.approx(352.189, abs=0.01)
        assert res["lh2_t"].max() == pytest.approx(32.094, abs=0.01)
        assert int(np.argmax(res["lh2_t"])) == 11


class TestSchedule:
    def test_reproducible(self):
        a = synthetic_schedule(seed=3, departures=50)
        b = synthetic_schedule(seed=3, departures=50)
        assert a == b

    def test_departure_count_and_hours(self):
        flights = synthetic_schedule(departures=500)
        assert len(flights) == 500
        hours = np.bincount([int(f.time_h) for f in flights], minlength=24)
        assert hours[3] <= 2 and hours[7] > 20

    def test_csv_roundtrip(self, tmp_path):
        flights = synthetic_schedule(seed=2, departures=40)
        write_schedule(tmp_path / "s.csv", flights)
        back = read_schedule(tmp_path / "s.csv")
        assert len(back) == 40
        for f, g in zip(flights, back):
            assert abs(f.time_h - g.time_h) <= 0.5 / 60.0 + 1e-9
            assert (f.dest_lat, f.dest_lon, f.aircraft_class) == (g.dest_lat, g.dest_lon, g.aircraft_class)

    def test_bad_csv_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("time,dest_lat,dest_lon,class\n07:10,95.0,3.0,regional\n")
        with pytest.raises(ValueError, match="line 2"):
            read_schedule(p)
