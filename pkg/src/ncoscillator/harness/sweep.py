"""Parameter sweeps: one config per value, run on a process pool, merged into
a single wide CSV keyed by (value, t)."""

import json
from concurrent.futures import ProcessPoolExecutor

from ..errors import ConfigError
from ..expectations import UncertaintyRecord
from .config import parse_config, set_path
from .runner import NUMERIC_ERRORS, fmt, write_csv


def parse_values(text):
    """``[0.1, 0.5]`` (JSON) or ``0.1,0.5``; an empty list is rejected."""
    text = text.strip()
    if text.startswith("["):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("--values", f"not a JSON list: {exc}") from exc
    else:
        values = []
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            try:
                values.append(json.loads(token))
            except json.JSONDecodeError:
                values.append(token)
    if not values:
        raise ConfigError("--values", "empty list of sweep values")
    return values


def _value_label(value):
    return json.dumps(value, sort_keys=True) if not isinstance(value, (int, float)) else fmt(float(value))


def sweep_one(raw, path, value):
    """Rows for a single sweep value; failures become one status row."""
    from .runner import records_for

    label = _value_label(value)
    try:
        cfg = parse_config(set_path(raw, path, value))
        times, items = records_for(cfg)
    except (ConfigError, *NUMERIC_ERRORS) as exc:
        return label, None, [[label, "", f"error: {type(exc).__name__}: {exc}"]]
    keys = [(f"{lab}:{col}", k, j) for k, (lab, header, _) in enumerate(items)
            for j, col in enumerate(header) if col != "t"]
    rows = []
    for i, t in enumerate(times):
        row = [label, fmt(float(t)), "ok"]
        row.extend(fmt(items[k][2][i][j]) for _, k, j in keys)
        rows.append(row)
    return label, [name for name, _, _ in keys], rows


def sweep(raw, path, values, output, workers=1):
    """Run the sweep and write ``output``; returns (rows, failures)."""
    if not values:
        raise ConfigError("--values", "empty list of sweep values")
    set_path(raw, path, values[0])  # resolves the path or raises
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(sweep_one, [raw] * len(values), [path] * len(values), values))
    else:
        parts = [sweep_one(raw, path, v) for v in values]
    columns = next((cols for _, cols, _ in parts if cols is not None), None)
    if columns is None:
        columns = [f"record:{c}" for c in UncertaintyRecord.columns()]
    header = ["value", "t", "status"] + columns
    rows = []
    failures = 0
    for _, cols, part in parts:
        if cols is None:
            failures += 1
            rows.append(part[0] + [""] * len(columns))
        elif cols != columns:
            failures += 1
            rows.append([part[0][0], "", "error: analysis columns differ from the first value"] + [""] * len(columns))
        else:
            rows.extend(part)
    write_csv(output, header, rows)
    return rows, failures
