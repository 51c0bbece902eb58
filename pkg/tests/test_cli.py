"""End-to-end tests of the command-line interface."""

import csv
import json

import pytest

from specloc import cli


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def read_report(path):
    return json.loads(path.read_text())


@pytest.fixture
def basic_spec(tmp_path):
    return write_json(tmp_path / "spec.json", {
        "schemaVersion": 1,
        "G": {"rays": [{"theta": 0.0, "radii": [1.0, 4.0]}]},
        "S": {"kind": "dense", "entries": [[0.0, 1.0], [0.0, 0.0]]},
        "p": 0.5,
    })


@pytest.fixture
def triple_spec(tmp_path):
    return write_json(tmp_path / "triple.json", {
        "G": {"rays": [{"theta": 0.0, "radii": [1.0, 5.0, 9.0]}]},
        "S": {"kind": "randomGaussian", "seed": 7, "scale": 0.2},
        "p": 0.5,
    })


class TestSubord:
    def test_basic(self, basic_spec, tmp_path):
        out = tmp_path / "report.json"
        assert cli.main(["subord", "--input", basic_spec, "--out", str(out)]) == 0
        report = read_report(out)
        assert report["command"] == "subord"
        assert abs(report["bound"] - 0.5) < 1e-5
        assert report["converged"] is True
        assert report["sampleViolations"] == 0
        assert len(report["input"]["digest"]) == 64


class TestEnclosure:
    def test_all_inside_with_artifacts(self, triple_spec, tmp_path):
        out = tmp_path / "report.json"
        points = tmp_path / "points.csv"
        lobes = tmp_path / "lobes.csv"
        code = cli.main(["enclosure", "--input", triple_spec, "--out", str(out),
                         "--points", str(points), "--lobes", str(lobes)])
        assert code == 0
        report = read_report(out)
        assert report["allInside"] is True
        assert report["violators"] == []
        with open(points) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["re", "im", "inside"]
        assert len(rows) == 4
        assert all(r[2] == "1" for r in rows[1:])
        with open(lobes) as fh:
            assert next(csv.reader(fh)) == ["theta", "x", "y_upper", "y_lower"]


class TestGaps:
    def test_asymptotic_model(self, tmp_path):
        spec = write_json(tmp_path / "gaps.json", {
            "gapModel": {"asymptotic": {"c": 1.0, "q": 2.0}, "l": 0.5, "p": 0.5,
                         "kMax": 100},
        })
        out = tmp_path / "report.json"
        assert cli.main(["gaps", "--input", spec, "--out", str(out)]) == 0
        report = read_report(out)
        assert report["allHold"] is True
        assert report["asymptoticVerdict"] == "holdsEventually"

    def test_explicit_radii(self, tmp_path):
        spec = write_json(tmp_path / "gaps.json", {
            "gapModel": {"radii": [1.0, 2.0, 10.0, 20.0], "l": 1.0, "p": 0.0},
        })
        out = tmp_path / "report.json"
        assert cli.main(["gaps", "--input", spec, "--out", str(out)]) == 0
        report = read_report(out)
        assert report["allHold"] is False
        assert report["failures"] == [1]
        assert report["asymptoticVerdict"] is None


class TestProject:
    def test_family_report(self, triple_spec, tmp_path):
        out = tmp_path / "report.json"
        code = cli.main(["project", "--input", triple_spec, "--out", str(out),
                         "--abscissas", "3,7,11", "--alpha", "1.0"])
        assert code == 0
        report = read_report(out)
        assert [p["rank"] for p in report["projections"]] == [1, 1]
        assert report["crossTalk"] <= 1e-6
        labels = [p["label"] for p in report["projections"]]
        assert labels == ["gap[3,7]", "gap[7,11]"]


class TestRieszConst:
    def test_chain_holds(self, triple_spec, tmp_path):
        out = tmp_path / "report.json"
        code = cli.main(["rieszconst", "--input", triple_spec, "--out", str(out),
                         "--abscissas", "3,7,11", "--alpha", "1.0"])
        assert code == 0
        report = read_report(out)
        assert report["twoSidedHolds"] is True
        assert report["chainHolds"] is True
        assert report["cHat"] <= report["cUpper"] + 1e-12
        assert report["basisConstant"] >= 1.0


class TestBlockop:
    def test_identity_coupling(self, tmp_path):
        spec = write_json(tmp_path / "ham.json", {
            "hamiltonian": {"rSeq": [4.0, 8.0, 12.0], "B": {"kind": "identity"},
                            "C": {"kind": "identity"}, "gamma": 1.0, "l": 1.5},
        })
        out = tmp_path / "report.json"
        assert cli.main(["blockop", "--input", spec, "--out", str(out)]) == 0
        report = read_report(out)
        assert report["perDiscCounts"] == [2, 2, 2]
        assert report["pairingDefects"] == []
        assert report["j1SkewResidual"] <= 1e-12

    def test_random_spd_blocks(self, tmp_path):
        spec = write_json(tmp_path / "ham.json", {
            "hamiltonian": {"rSeq": [10.0, 20.0, 30.0],
                            "B": {"kind": "randomSpd", "seed": 1, "gamma": 0.5, "spread": 0.5},
                            "C": {"kind": "randomSpd", "seed": 2, "gamma": 0.5, "spread": 0.5},
                            "gamma": 0.5, "l": 1.5},
        })
        out = tmp_path / "report.json"
        assert cli.main(["blockop", "--input", spec, "--out", str(out)]) == 0


class TestSweepAndDemo:
    def test_sweep_small(self, tmp_path):
        out = tmp_path / "report.json"
        code = cli.main(["sweep", "--seeds", "0,1", "--out", str(out), "--no-timestamp"])
        assert code == 0
        report = read_report(out)
        assert [c["seed"] for c in report["cases"]] == [0, 1]
        assert report["allInside"] is True
        assert report["negativeControlViolatorFraction"] == 1.0

    def test_sweep_deterministic_bytes(self, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        for out in (out1, out2):
            assert cli.main(["sweep", "--seeds", "3", "--out", str(out),
                             "--no-timestamp"]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_range_parsing(self):
        assert cli._parse_seed_range("2..5") == [2, 3, 4, 5]
        assert cli._parse_seed_range("7,1,3") == [7, 1, 3]

    def test_demo_points(self, tmp_path):
        out = tmp_path / "report.json"
        points = tmp_path / "demo.csv"
        code = cli.main(["demo", "figure4", "--out", str(out), "--points", str(points)])
        assert code == 0
        report = read_report(out)
        with open(points) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["kind", "x", "y"]
        assert len(rows) - 1 == report["pointRows"]
        kinds = {r[0] for r in rows[1:]}
        assert "eigenvalue" in kinds and "parabola_upper" in kinds


class TestErrorPaths:
    def test_missing_file(self, tmp_path):
        assert cli.main(["subord", "--input", str(tmp_path / "nope.json")]) == 2

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli.main(["subord", "--input", str(bad)]) == 2

    def test_unsupported_schema_version(self, tmp_path):
        spec = write_json(tmp_path / "v9.json", {"schemaVersion": 9})
        assert cli.main(["subord", "--input", spec]) == 2

    def test_missing_p(self, tmp_path):
        spec = write_json(tmp_path / "nop.json", {
            "G": {"rays": [{"theta": 0.0, "radii": [1.0]}]},
            "S": {"kind": "dense", "entries": [[0.0]]},
        })
        assert cli.main(["subord", "--input", spec]) == 2

    def test_unknown_flag(self, basic_spec):
        assert cli.main(["subord", "--input", basic_spec, "--bogus"]) == 2

    def test_contour_through_spectrum_is_check_failure(self, tmp_path):
        spec = write_json(tmp_path / "exact.json", {
            "G": {"rays": [{"theta": 0.0, "radii": [1.0, 5.0, 9.0]}]},
            "S": {"kind": "randomGaussian", "seed": 0, "scale": 0.0},
            "p": 0.5,
        })
        assert cli.main(["project", "--input", spec,
                         "--abscissas", "5,7", "--alpha", "1.0"]) == 1
