"""Series ingestion, the embedded Nile benchmark, and result serialization.

`TimeSeries` is the common container that the detector and the CLI pass
around; `read_csv` builds one from delimited text with precise cell-level
error reporting; `nile` returns the classic 100-year annual-flow record;
`DetectionReport` freezes a detection run (points plus every examined
statistic profile) and round-trips losslessly through JSON.
"""

import csv
import json

import numpy as np
from dataclasses import dataclass

from .detector import DetectorConfig, TestProfile

__all__ = [
    "TimeSeries",
    "DetectionReport",
    "read_csv",
    "nile",
    "build_report",
    "write_report",
    "read_report",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1

# Annual flow of the Nile at Aswan, 1871-1970 (10^8 m^3), the standard
# 100-point benchmark series.
_NILE_FLOWS = (
    1120, 1160, 963, 1210, 1160, 1160, 813, 1230, 1370, 1140,
    995, 935, 1110, 994, 1020, 960, 1180, 799, 958, 1140,
    1100, 1210, 1150, 1250, 1260, 1220, 1030, 1100, 774, 840,
    874, 694, 940, 833, 701, 916, 692, 1020, 1050, 969,
    831, 726, 456, 824, 702, 1120, 1100, 832, 764, 821,
    768, 845, 864, 862, 698, 845, 744, 796, 1040, 759,
    781, 865, 845, 944, 984, 897, 822, 1010, 771, 676,
    649, 846, 812, 742, 801, 1040, 860, 874, 848, 890,
    744, 749, 838, 1050, 918, 986, 797, 923, 975, 815,
    1020, 906, 901, 1170, 912, 746, 919, 718, 714, 740,
)


@dataclass(frozen=True)
class TimeSeries:
    """An n-by-d series of observations.

    Attributes
    ----------
    values : ndarray, shape (n, d)
        Finite reals; rows are observations in time order.
    labels : tuple or None
        Optional per-row axis labels (e.g. years), strictly increasing.
    name : str
    """

    values: np.ndarray
    labels: tuple | None = None
    name: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise ValueError("series values must be a 2-d matrix")
        if not np.all(np.isfinite(values)):
            raise ValueError("series values must all be finite")
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != values.shape[0]:
                raise ValueError(
                    "got %d labels for %d observations" % (len(labels), values.shape[0])
                )
            if any(b <= a for a, b in zip(labels, labels[1:])):
                raise ValueError("labels must be strictly increasing")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class DetectionReport:
    """A finished detection run, ready to serialize.

    Holds the series name, the exact detector configuration, the detected
    points (with axis labels when the series has them), and the statistic
    profile of every segment the segmentation examined.
    """

    series_name: str
    series_length: int
    config: DetectorConfig
    points: tuple  # of (index, label-or-None, statistic, depth)
    profiles: tuple  # of TestProfile


def nile():
    """The embedded Nile annual-flow series, year labels 1871-1970."""
    return TimeSeries(
        values=np.array(_NILE_FLOWS, dtype=np.float64).reshape(-1, 1),
        labels=tuple(range(1871, 1971)),
        name="nile",
    )


def read_csv(path, header=False, delimiter=",", label_column=None):
    """Load a delimited text file as a TimeSeries.

    Parameters
    ----------
    path : str
        File to read.
    header : bool
        Skip the first row.
    delimiter : str
    label_column : int or None
        0-based column to treat as the axis labels instead of data.

    Returns
    -------
    TimeSeries

    Raises
    ------
    OSError
        Unreadable file.
    ValueError
        Non-numeric or non-finite cell (the message names the row and
        column), ragged rows, or no data.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if header and rows:
        rows = rows[1:]
    rows = [row for row in rows if row]
    if not rows:
        raise ValueError("%s: no data rows" % path)

    width = len(rows[0])
    data = []
    labels = []
    for i, row in enumerate(rows):
        # rows/columns are reported 1-based, counting the header if any
        rownum = i + 1 + (1 if header else 0)
        if len(row) != width:
            raise ValueError(
                "%s: row %d has %d fields, expected %d" % (path, rownum, len(row), width)
            )
        rec = []
        for j, cell in enumerate(row):
            if label_column is not None and j == label_column:
                continue
            try:
                value = float(cell)
            except ValueError:
                value = float("nan")
            if not np.isfinite(value):
                raise ValueError(
                    "%s: cell at row %d, column %d is not a finite number: %r"
                    % (path, rownum, j + 1, cell)
                )
            rec.append(value)
        if label_column is not None:
            raw = row[label_column]
            try:
                label = int(raw)
            except ValueError:
                try:
                    label = float(raw)
                except ValueError:
                    raise ValueError(
                        "%s: label cell at row %d, column %d is not numeric: %r"
                        % (path, rownum, label_column + 1, raw)
                    ) from None
            labels.append(label)
        if not rec:
            raise ValueError("%s: row %d has no data columns" % (path, rownum))
        data.append(rec)

    return TimeSeries(
        values=np.array(data, dtype=np.float64),
        labels=tuple(labels) if label_column is not None else None,
        name=path,
    )


def build_report(series, segmentation):
    """Assemble a DetectionReport from a series and its segmentation."""
    pts = []
    for p in segmentation.points:
        label = series.labels[p.index] if series.labels is not None else None
        pts.append((p.index, label, p.statistic, p.depth))
    return DetectionReport(
        series_name=series.name,
        series_length=segmentation.series_length,
        config=segmentation.config,
        points=tuple(pts),
        profiles=segmentation.profiles,
    )


def _config_to_dict(cfg):
    return {
        "k": cfg.k,
        "threshold": cfg.threshold,
        "min_seg": cfg.min_seg,
        "seed": cfg.seed,
        "max_depth": cfg.max_depth,
    }


def _report_to_dict(report):
    return {
        "schema_version": SCHEMA_VERSION,
        "series_name": report.series_name,
        "series_length": report.series_length,
        "config": _config_to_dict(report.config),
        "points": [
            {
                # indices are 1-based in serialized output
                "index": index + 1,
                "label": label,
                "statistic": statistic,
                "depth": depth,
            }
            for index, label, statistic, depth in report.points
        ],
        "profiles": [
            {
                "segment_start": prof.segment_start,
                "segment_end": prof.segment_end,
                "stats": [[int(i), float(v)] for i, v in prof.stats],
            }
            for prof in report.profiles
        ],
    }


def write_report(report, path, format="json"):
    """Serialize a DetectionReport deterministically.

    JSON keeps everything (round-trips losslessly via `read_report`); CSV
    keeps the points only, one row per detected change, with columns
    index,label,statistic,depth and 1-based indices.
    """
    if format == "json":
        doc = json.dumps(_report_to_dict(report), indent=2, sort_keys=True)
        with open(path, "w") as fh:
            fh.write(doc + "\n")
    elif format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "label", "statistic", "depth"])
            for index, label, statistic, depth in report.points:
                writer.writerow(
                    [
                        index + 1,
                        "" if label is None else label,
                        repr(float(statistic)),
                        depth,
                    ]
                )
    else:
        raise ValueError("unknown report format: %r" % (format,))


def read_report(path):
    """Load a JSON report written by `write_report` back into objects."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            "unsupported report schema version: %r" % (doc.get("schema_version"),)
        )
    cfg = DetectorConfig(**doc["config"])
    points = tuple(
        (p["index"] - 1, p["label"], p["statistic"], p["depth"]) for p in doc["points"]
    )
    profiles = tuple(
        TestProfile(
            segment_start=p["segment_start"],
            segment_end=p["segment_end"],
            stats=tuple((int(i), float(v)) for i, v in p["stats"]),
        )
        for p in doc["profiles"]
    )
    return DetectionReport(
        series_name=doc["series_name"],
        series_length=doc["series_length"],
        config=cfg,
        points=points,
        profiles=profiles,
    )
