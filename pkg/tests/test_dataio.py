import json

import numpy as np
import pytest

from cecpd.dataio import (
    SCHEMA_VERSION,
    DetectionReport,
    TimeSeries,
    build_report,
    nile,
    read_csv,
    read_report,
    write_report,
)
from cecpd.detector import DetectorConfig, detect_multiple


@pytest.fixture(scope="module")
def segmented():
    """A small detection run shared by the report tests."""
    rng = np.random.default_rng(21)
    x = np.vstack([rng.normal(size=(40, 1)), rng.normal(loc=5.0, size=(40, 1))])
    series = TimeSeries(values=x, labels=tuple(range(1900, 1980)), name="demo")
    seg = detect_multiple(series.values, DetectorConfig(min_seg=15))
    return series, seg


class TestTimeSeries:
    def test_reshapes_flat_input(self):
        s = TimeSeries(values=np.arange(5.0))
        assert s.values.shape == (5, 1)
        assert len(s) == 5

    def test_rejects_three_dimensional_values(self):
        with pytest.raises(ValueError):
            TimeSeries(values=np.zeros((2, 2, 2)))

    @pytest.mark.parametrize("bad", [float("nan"), float("inf")])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            TimeSeries(values=np.array([1.0, bad, 3.0]))

    def test_label_count_must_match(self):
        with pytest.raises(ValueError):
            TimeSeries(values=np.arange(4.0), labels=(1, 2, 3))

    def test_labels_must_strictly_increase(self):
        with pytest.raises(ValueError):
            TimeSeries(values=np.arange(3.0), labels=(1, 1, 2))
        with pytest.raises(ValueError):
            TimeSeries(values=np.arange(3.0), labels=(3, 2, 1))

    def test_labels_stored_as_tuple(self):
        s = TimeSeries(values=np.arange(3.0), labels=[10, 20, 30])
        assert s.labels == (10, 20, 30)


class TestNile:
    def test_shape_and_labels(self):
        s = nile()
        assert s.values.shape == (100, 1)
        assert s.labels[0] == 1871
        assert s.labels[-1] == 1970
        assert s.name == "nile"

    def test_frozen_values(self):
        s = nile()
        assert s.values[0, 0] == 1120.0
        assert s.values[-1, 0] == 740.0
        assert s.values[42, 0] == 456.0  # the 1913 minimum
        assert float(s.values.sum()) == 91935.0

    def test_calls_are_identical(self):
        assert (nile().values == nile().values).all()


class TestReadCsv:
    def test_plain_numeric_file(self, tmp_path):
        p = tmp_path / "plain.csv"
        p.write_text("1.5,2\n3,4.25\n-1e3,0.5\n")
        s = read_csv(str(p))
        assert s.values.shape == (3, 2)
        assert s.values[2, 0] == -1000.0
        assert s.labels is None
        assert s.name == str(p)

    def test_header_skipped(self, tmp_path):
        p = tmp_path / "head.csv"
        p.write_text("a,b\n1,2\n3,4\n")
        s = read_csv(str(p), header=True)
        assert s.values.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_error_rows_counted_with_header(self, tmp_path):
        # the bad cell is reported with the header included in the count
        p = tmp_path / "head2.csv"
        p.write_text("a,b\n1,2\n3,oops\n")
        with pytest.raises(ValueError, match=r"row 3, column 2"):
            read_csv(str(p), header=True)

    def test_alternate_delimiter(self, tmp_path):
        p = tmp_path / "semi.csv"
        p.write_text("1;2\n3;4\n")
        s = read_csv(str(p), delimiter=";")
        assert s.values.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_label_column_extracted(self, tmp_path):
        p = tmp_path / "lab.csv"
        p.write_text("1871,1120\n1872,1160\n1873,963\n")
        s = read_csv(str(p), label_column=0)
        assert s.labels == (1871, 1872, 1873)
        assert s.values.shape == (3, 1)
        assert s.values[:, 0].tolist() == [1120.0, 1160.0, 963.0]

    def test_nan_text_cell_rejected_with_location(self, tmp_path):
        p = tmp_path / "nan.csv"
        p.write_text("1,2\n3,NaN\n")
        with pytest.raises(ValueError, match=r"row 2, column 2.*'NaN'"):
            read_csv(str(p))

    def test_ragged_rows_rejected(self, tmp_path):
        p = tmp_path / "ragged.csv"
        p.write_text("1,2\n3\n")
        with pytest.raises(ValueError, match=r"row 2 has 1 fields"):
            read_csv(str(p))

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            read_csv(str(tmp_path / "absent.csv"))

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(ValueError, match="no data rows"):
            read_csv(str(p))

    def test_non_numeric_label_rejected(self, tmp_path):
        p = tmp_path / "badlab.csv"
        p.write_text("y1,1\ny2,2\n")
        with pytest.raises(ValueError, match=r"label cell at row 1"):
            read_csv(str(p), label_column=0)

    def test_label_only_rows_rejected(self, tmp_path):
        p = tmp_path / "onlylab.csv"
        p.write_text("1871\n1872\n")
        with pytest.raises(ValueError, match="no data columns"):
            read_csv(str(p), label_column=0)

    def test_repr_floats_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(33)
        x = rng.normal(size=(20, 3))
        p = tmp_path / "rt.csv"
        p.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in x) + "\n")
        s = read_csv(str(p))
        assert (s.values == x).all()


class TestReports:
    def test_build_report_attaches_labels(self, segmented):
        series, seg = segmented
        report = build_report(series, seg)
        assert report.series_name == "demo"
        assert report.series_length == 80
        assert len(report.points) == len(seg.points)
        for (idx, label, stat, depth), p in zip(report.points, seg.points):
            assert idx == p.index
            assert label == 1900 + p.index
            assert stat == p.statistic
            assert depth == p.depth

    def test_build_report_without_labels(self, segmented):
        series, seg = segmented
        bare = TimeSeries(values=series.values, name="bare")
        report = build_report(bare, seg)
        assert all(label is None for _, label, _, _ in report.points)

    def test_json_round_trip_lossless(self, segmented, tmp_path):
        series, seg = segmented
        report = build_report(series, seg)
        path = str(tmp_path / "report.json")
        write_report(report, path)
        again = read_report(path)
        assert again == report

    def test_json_output_deterministic(self, segmented, tmp_path):
        series, seg = segmented
        report = build_report(series, seg)
        p1, p2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        write_report(report, p1)
        write_report(report, p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_serialized_indices_are_one_based(self, segmented, tmp_path):
        series, seg = segmented
        report = build_report(series, seg)
        path = str(tmp_path / "report.json")
        write_report(report, path)
        doc = json.load(open(path))
        assert doc["schema_version"] == SCHEMA_VERSION
        for row, (idx, _, _, _) in zip(doc["points"], report.points):
            assert row["index"] == idx + 1

    def test_csv_format_keeps_points(self, segmented, tmp_path):
        series, seg = segmented
        report = build_report(series, seg)
        path = str(tmp_path / "report.csv")
        write_report(report, path, format="csv")
        lines = open(path).read().splitlines()
        assert lines[0] == "index,label,statistic,depth"
        assert len(lines) == 1 + len(report.points)
        first = lines[1].split(",")
        assert int(first[0]) == report.points[0][0] + 1
        assert float(first[2]) == report.points[0][2]  # repr round-trips

    def test_unknown_format_rejected(self, segmented, tmp_path):
        series, seg = segmented
        report = build_report(series, seg)
        with pytest.raises(ValueError):
            write_report(report, str(tmp_path / "r.xml"), format="xml")

    def test_wrong_schema_version_rejected(self, segmented, tmp_path):
        series, seg = segmented
        report = build_report(series, seg)
        path = str(tmp_path / "report.json")
        write_report(report, path)
        doc = json.load(open(path))
        doc["schema_version"] = 99
        open(path, "w").write(json.dumps(doc))
        with pytest.raises(ValueError, match="schema version"):
            read_report(path)

    def test_empty_detection_round_trips(self, tmp_path):
        report = DetectionReport(
            series_name="quiet",
            series_length=40,
            config=DetectorConfig(),
            points=(),
            profiles=(),
        )
        path = str(tmp_path / "quiet.json")
        write_report(report, path)
        assert read_report(path) == report
