"""CSV ingest/validation for the price and exposure panels, and result-table output.

Input schemas
-------------
prices  : header ``date,close``        ISO-8601 dates, positive closes
monthly : header ``month,margin_debt,vix``  months ``YYYY-MM``, no gaps
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import regime as regime_mod
from . import timeseries

PRICE_HEADER = ["date", "close"]
MONTHLY_HEADER = ["month", "margin_debt", "vix"]


@dataclass(frozen=True)
class PricePath:
    """Dated daily closing-price sequence."""

    dates: np.ndarray  # datetime64[D], strictly increasing
    closes: np.ndarray  # float, strictly positive

    def __post_init__(self) -> None:
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        closes = np.asarray(self.closes, dtype=float)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)
        if dates.size != closes.size:
            raise ValueError("dates and closes must have equal length")
        if dates.size < 2:
            raise ValueError("price path must have length >= 2")
        if not np.all(np.diff(dates).astype(int) > 0):
            raise ValueError("dates must be strictly increasing with no duplicates")
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            raise ValueError("closes must be strictly positive and finite")

    def __len__(self) -> int:
        return int(self.closes.size)


@dataclass(frozen=True)
class MonthlyTable:
    """Raw month/exposure/volatility columns, before detrending and classification."""

    months: list[str]
    margin_debt: np.ndarray
    vol_proxy: np.ndarray


@dataclass(frozen=True)
class MonthlyPanel:
    """Month-indexed exposure panel with detrended level and stress flags."""

    months: list[str]
    margin_debt: np.ndarray
    vol_proxy: np.ndarray
    detrended: np.ndarray
    regime: np.ndarray  # int {0,1}
    threshold: float
    q: float

    def __post_init__(self) -> None:
        n = len(self.months)
        for name in ("margin_debt", "vol_proxy", "detrended", "regime"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} has length != {n}")
        if any(a >= b for a, b in zip(self.months, self.months[1:])):
            raise ValueError("months must be strictly increasing")
        n_above = int(np.sum(np.asarray(self.vol_proxy) > self.threshold))
        if int(np.sum(self.regime)) != n_above:
            raise ValueError("regime flag count inconsistent with stored threshold")

    def __len__(self) -> int:
        return len(self.months)


def _read_rows(path: str | Path, expected_header: list[str]) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise ValueError(
                f"{path}: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        return [row for row in reader if row]


def load_price_csv(path: str | Path) -> PricePath:
    """Load and validate a ``date,close`` daily price file.

    Out-of-order rows are sorted with a warning; duplicate dates and
    non-positive closes are fatal, with the offending file row named.
    """
    rows = _read_rows(path, PRICE_HEADER)
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 price rows, got {len(rows)}")
    dates = np.empty(len(rows), dtype="datetime64[D]")
    closes = np.empty(len(rows), dtype=float)
    for i, row in enumerate(rows):
        line_no = i + 2  # header is line 1
        if len(row) != 2:
            raise ValueError(f"{path}: row {line_no}: expected 2 fields, got {len(row)}")
        try:
            dates[i] = np.datetime64(row[0].strip(), "D")
        except ValueError:
            raise ValueError(f"{path}: row {line_no}: bad ISO date {row[0]!r}") from None
        try:
            closes[i] = float(row[1])
        except ValueError:
            raise ValueError(f"{path}: row {line_no}: bad close {row[1]!r}") from None
        if not np.isfinite(closes[i]) or closes[i] <= 0:
            raise ValueError(f"{path}: row {line_no}: non-positive close {row[1]}")

    n_unsorted = int(np.sum(np.diff(dates).astype(int) < 0))
    if n_unsorted > 0:
        order = np.argsort(dates, kind="stable")
        dates, closes = dates[order], closes[order]
        warnings.warn(f"{path}: {n_unsorted} out-of-order rows were sorted by date")
    dup = np.flatnonzero(np.diff(dates).astype(int) == 0)
    if dup.size > 0:
        raise ValueError(f"{path}: duplicate date {dates[dup[0] + 1]}")
    return PricePath(dates, closes)


def _month_add(month: str, k: int) -> str:
    y, m = int(month[:4]), int(month[5:7])
    m0 = (y * 12 + (m - 1)) + k
    return f"{m0 // 12:04d}-{m0 % 12 + 1:02d}"


def load_monthly_csv(path: str | Path) -> MonthlyTable:
    """Load and validate a ``month,margin_debt,vix`` monthly file.

    Months must be unique and, after sorting, gap-free; missing months are
    listed in the error.
    """
    rows = _read_rows(path, MONTHLY_HEADER)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    months: list[str] = []
    margin = np.empty(len(rows), dtype=float)
    vol = np.empty(len(rows), dtype=float)
    for i, row in enumerate(rows):
        line_no = i + 2
        if len(row) != 3:
            raise ValueError(f"{path}: row {line_no}: expected 3 fields, got {len(row)}")
        m = row[0].strip()
        if len(m) != 7 or m[4] != "-" or not (m[:4].isdigit() and m[5:].isdigit()):
            raise ValueError(f"{path}: row {line_no}: bad month {row[0]!r}, want YYYY-MM")
        if not 1 <= int(m[5:7]) <= 12:
            raise ValueError(f"{path}: row {line_no}: bad month {row[0]!r}")
        months.append(m)
        for col, j, name in ((margin, 1, "margin_debt"), (vol, 2, "vix")):
            try:
                col[i] = float(row[j])
            except ValueError:
                raise ValueError(f"{path}: row {line_no}: bad {name} {row[j]!r}") from None
            if not np.isfinite(col[i]) or col[i] <= 0:
                raise ValueError(f"{path}: row {line_no}: non-positive {name} {row[j]}")

    if len(set(months)) != len(months):
        seen: set[str] = set()
        dup = next(m for m in months if m in seen or seen.add(m))
        raise ValueError(f"{path}: duplicate month {dup}")
    order = sorted(range(len(months)), key=lambda i: months[i])
    if order != list(range(len(months))):
        n_unsorted = sum(1 for a, b in zip(months, months[1:]) if b < a)
        warnings.warn(f"{path}: {n_unsorted} out-of-order rows were sorted by month")
        months = [months[i] for i in order]
        margin, vol = margin[order], vol[order]
    missing = []
    for a, b in zip(months, months[1:]):
        nxt = _month_add(a, 1)
        while nxt < b:
            missing.append(nxt)
            nxt = _month_add(nxt, 1)
    if missing:
        raise ValueError(f"{path}: monthly sequence has gaps; missing: {', '.join(missing)}")
    return MonthlyTable(months, margin, vol)


def load_exposure_csv(path: str | Path) -> MonthlyTable:
    """Generic ``period,exposure,vol`` loader (no gap rule; any frequency).

    Used for the companion exposure test; periods sort lexicographically,
    so use ISO dates or YYYY-MM identifiers.
    """
    rows = _read_rows(path, ["period", "exposure", "vol"])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    periods = [r[0].strip() for r in rows]
    if len(set(periods)) != len(periods):
        raise ValueError(f"{path}: duplicate periods")
    try:
        exposure = np.array([float(r[1]) for r in rows])
        vol = np.array([float(r[2]) for r in rows])
    except (ValueError, IndexError):
        raise ValueError(f"{path}: malformed numeric fields") from None
    if np.any(exposure <= 0) or np.any(vol <= 0):
        raise ValueError(f"{path}: exposure and vol must be strictly positive")
    order = sorted(range(len(periods)), key=lambda i: periods[i])
    return MonthlyTable([periods[i] for i in order], exposure[order], vol[order])


def build_panel(
    table: MonthlyTable,
    q: float = 0.10,
    detrend_scheme: str = "log_linear",
    detrend_param: float | None = None,
) -> MonthlyPanel:
    """Attach detrended level and stress flags to a raw monthly table."""
    fit = timeseries.detrend(table.margin_debt, detrend_scheme, detrend_param)
    cls = regime_mod.classify(table.vol_proxy, q)
    return MonthlyPanel(
        months=list(table.months),
        margin_debt=np.asarray(table.margin_debt, dtype=float),
        vol_proxy=np.asarray(table.vol_proxy, dtype=float),
        detrended=fit.detrended,
        regime=cls.flags,
        threshold=cls.threshold,
        q=q,
    )


# ---------------------------------------------------------------------------
# Result tables
# ---------------------------------------------------------------------------

def _format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def _json_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.10g}")
    return v


def write_table(rows: list[dict], path: str | Path, format: str = "csv") -> None:
    """Write result records with a deterministic column order.

    Columns follow the first row's key order; floats are serialized with 10
    significant digits; the JSON form mirrors the CSV columns exactly.
    """
    if not rows:
        raise ValueError("no rows")
    if format not in ("csv", "json"):
        raise ValueError(f"unknown format {format!r}")
    columns = list(rows[0].keys())
    for r in rows:
        if list(r.keys()) != columns:
            raise ValueError("all rows must share the same column order")
    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_format_cell(r[c]) for c in columns])
    else:
        payload = [{c: _json_cell(r[c]) for c in columns} for r in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _parse_cell(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_table(path: str | Path) -> list[dict]:
    """Read back a table written by write_table (CSV or JSON by extension)."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path) as fh:
            return json.load(fh)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return [{c: _parse_cell(v) for c, v in zip(header, row)} for row in reader]
