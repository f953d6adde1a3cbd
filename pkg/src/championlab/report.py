"""Report construction and emission (JSON, CSV, plot series, figures).

Every command produces one Report. JSON is the full-fidelity format and
round-trips exactly; CSV is a flat view of the result; the plot format
is a two-column whitespace series with '#' comment headers, and the
histogram-like commands can additionally render a figure file next to
it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import DomainError, ReportIOError

SCHEMA = "champion-lab/1"
VERSION = "0.1.0"

_INT64_MAX = 2**63 - 1


def jsonable(value: Any) -> Any:
    """Deep-copy a payload, turning ints beyond 64 bits into decimal strings."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) > _INT64_MAX else value
    if isinstance(value, float) or isinstance(value, str) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    raise TypeError(f"payload value {value!r} is not JSON-serializable")


@dataclass
class Report:
    command: str
    inputs: dict
    result: dict
    provenance: dict
    schema: str = SCHEMA

    def to_json(self) -> str:
        doc = {
            "schema": self.schema,
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "provenance": self.provenance,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        doc = json.loads(text)
        return cls(
            command=doc["command"],
            inputs=doc["inputs"],
            result=doc["result"],
            provenance=doc["provenance"],
            schema=doc["schema"],
        )


def _csv(header: str, rows: list[str]) -> str:
    return "\n".join([header] + rows) + "\n"


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(report: Report) -> str:
    r = report.result
    cmd = report.command
    if cmd == "census":
        return _csv(
            "d,count",
            [f"{d},{r['counts'][d]}" for d in sorted(r["counts"], key=int)],
        )
    if cmd == "champion":
        champs = ";".join(str(c) for c in r["champions"])
        return _csv("x,total_primes,n_star,champions",
                    [f"{r['x']},{r['total_primes']},{r['n_star']},{champs}"])
    if cmd == "pairs":
        return _csv("x,d,count", [f"{r['x']},{r['d']},{r['count']}"])
    if cmd == "triples":
        return _csv("x,d1,d,count", [f"{r['x']},{r['d1']},{r['d']},{r['count']}"])
    if cmd == "tuple":
        return _csv(
            "x,d1,d2,d,count",
            [f"{r['x']},{r['d1']},{r['d2']},{r['d']},{r['count']}"],
        )
    if cmd == "sseries":
        offsets = ";".join(str(o) for o in r["offsets"])
        return _csv(
            "offsets,value,reason",
            [f"{offsets},{_fmt(r['value'])},{r.get('reason') or ''}"],
        )
    if cmd == "average":
        return _csv(
            "k,d,cap,sum,main_term,ratio,remainder",
            [
                f"{r['k']},{r['d']},{r['cap']},{_fmt(r['sum'])},"
                f"{_fmt(r['main_term'])},{_fmt(r['ratio'])},{_fmt(r['remainder'])}"
            ],
        )
    if cmd == "model":
        rows = [f"{d},{_fmt(r['values'][d])}" for d in sorted(r["values"], key=int)]
        return _csv("d,model", rows)
    if cmd == "intervals":
        rows = [
            f"{row['k']},{row['primorial']},{row['lo']},{row['hi']}"
            for row in r["rows"]
        ]
        return _csv("k,primorial,lo,hi", rows)
    if cmd == "compare":
        rows = [
            f"{row['d']},{row['observed']},{_fmt(row['predicted'])},"
            f"{_fmt(row['ratio'])},{_fmt(row['li_ratio'])}"
            for row in r["rows"]
        ]
        return _csv("d,observed,predicted,ratio,li_ratio", rows)
    raise DomainError(f"no CSV view for command {cmd!r}")


def _series(report: Report) -> tuple[str, str, list[tuple[float, float]]]:
    """Extract the (abscissa, ordinate) series behind a plottable report."""
    r = report.result
    cmd = report.command
    if cmd == "census":
        pts = [(int(d), float(c)) for d, c in sorted(r["counts"].items(), key=lambda kv: int(kv[0]))]
        return "d", "N(x,d)", pts
    if cmd == "model":
        pts = [(int(d), float(v)) for d, v in sorted(r["values"].items(), key=lambda kv: int(kv[0]))]
        return "d", "M(x,d)", pts
    if cmd == "compare":
        pts = [
            (int(row["d"]), float(row["ratio"]))
            for row in r["rows"]
            if row["ratio"] is not None
        ]
        return "d", "observed/predicted", pts
    raise DomainError(f"command {cmd!r} produces no plottable series")


def emit_plot_series(report: Report) -> str:
    xlabel, ylabel, pts = _series(report)
    inputs = " ".join(f"{k}={v}" for k, v in sorted(report.inputs.items()))
    lines = [
        f"# championlab {report.command} {inputs}".rstrip(),
        f"# {xlabel} {ylabel}",
    ]
    lines += [f"{x:g} {y:g}" for x, y in pts]
    return "\n".join(lines) + "\n"


def render_figure(report: Report, path: Path | str) -> None:
    """Render the report's series to an image file via matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xlabel, ylabel, pts = _series(report)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if report.command == "census":
        ax.bar(xs, ys, width=1.6, color="#33658a")
        ax.set_yscale("symlog")
    elif report.command == "compare":
        ax.axhline(1.0, color="#999999", lw=0.8)
        ax.plot(xs, ys, "o", ms=4, color="#f26419")
    else:
        ax.plot(xs, ys, "-", lw=1.2, color="#2f4b7c")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    inputs = " ".join(f"{k}={v}" for k, v in sorted(report.inputs.items()))
    ax.set_title(f"{report.command} {inputs}".strip())
    fig.tight_layout()
    try:
        fig.savefig(path, dpi=130)
    except OSError as exc:
        raise ReportIOError(f"cannot write figure {path}: {exc}") from exc
    finally:
        plt.close(fig)


def emit(report: Report, fmt: str) -> str:
    if fmt == "json":
        return report.to_json()
    if fmt == "csv":
        return to_csv(report)
    if fmt == "plot":
        return emit_plot_series(report)
    raise DomainError(f"unknown format {fmt!r}")
