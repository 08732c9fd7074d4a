"""Simulation time series, CSV export/parse and plot-script generation."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TAIL_FRACTION = 0.25

_EVENT_RE = re.compile(r"^# event t=(\S+) (\S+)$")
_META_RE = re.compile(r"^# scenario name=(\S*) measurement=(\S*)$")


def column_names(n, m, k):
    return (
        ["t"]
        + [f"x{i}" for i in range(1, n + 1)]
        + [f"y{i}" for i in range(1, n + 1)]
        + [f"u{i}" for i in range(1, m + 1)]
        + [f"u0_{i}" for i in range(1, m + 1)]
        + [f"uc_{i}" for i in range(1, m + 1)]
        + [f"theta_{i}" for i in range(1, k + 1)]
        + ["lambda", "V", "x_norm"]
    )


@dataclass
class RunSummary:
    terminal_x_norm: float
    tail_sup_x_norm: float
    theta_final: np.ndarray
    lambda_final: float


@dataclass(eq=False)
class RunLog:
    """Logged samples of one closed-loop run; one row per logged step."""

    n: int
    m: int
    k: int
    data: np.ndarray
    events: list = field(default_factory=list)  # (t, label)
    name: str = ""
    measurement_kind: str = ""

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        width = 1 + 2 * self.n + 3 * self.m + self.k + 3
        if self.data.ndim != 2 or self.data.shape[1] != width:
            raise ValueError(f"RunLog data must have {width} columns, got shape {self.data.shape}")

    @property
    def columns(self):
        return column_names(self.n, self.m, self.k)

    def _block(self, start, width):
        return self.data[:, start:start + width]

    @property
    def t(self):
        return self.data[:, 0]

    @property
    def x(self):
        return self._block(1, self.n)

    @property
    def y(self):
        return self._block(1 + self.n, self.n)

    @property
    def u(self):
        return self._block(1 + 2 * self.n, self.m)

    @property
    def u0(self):
        return self._block(1 + 2 * self.n + self.m, self.m)

    @property
    def uc(self):
        return self._block(1 + 2 * self.n + 2 * self.m, self.m)

    @property
    def theta(self):
        return self._block(1 + 2 * self.n + 3 * self.m, self.k)

    @property
    def lam(self):
        return self.data[:, -3]

    @property
    def V(self):
        return self.data[:, -2]

    @property
    def x_norm(self):
        return self.data[:, -1]

    def __len__(self):
        return self.data.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RunLog):
            return NotImplemented
        return (
            (self.n, self.m, self.k, self.name, self.measurement_kind) == (other.n, other.m, other.k, other.name, other.measurement_kind)
            and self.events == other.events
            and np.array_equal(self.data, other.data)
        )

    def window(self, t_from, t_to=np.inf):
        """Boolean mask of rows with ``t_from <= t <= t_to``."""
        return (self.t >= t_from) & (self.t <= t_to)

    def tail_mask(self, fraction=TAIL_FRACTION):
        t0, t1 = self.t[0], self.t[-1]
        return self.t >= t1 - fraction * (t1 - t0) - 1e-12

    def summary(self) -> RunSummary:
        return RunSummary(
            terminal_x_norm=float(self.x_norm[-1]),
            tail_sup_x_norm=float(self.x_norm[self.tail_mask()].max()),
            theta_final=self.theta[-1].copy(),
            lambda_final=float(self.lam[-1]),
        )


def _fmt(v: float) -> str:
    return repr(float(v))


def _fmt_t(t: float) -> str:
    return f"{t:.12g}"


def export_csv(log: RunLog, path) -> Path:
    """Write ``log`` as CSV; events become ``# event t=<t> <label>`` lines before their row."""
    path = Path(path)
    lines = [f"# scenario name={log.name} measurement={log.measurement_kind}", ",".join(log.columns)]
    pending = sorted(log.events)
    for row in log.data:
        while pending and pending[0][0] <= row[0] + 1e-12:
            t_ev, label = pending.pop(0)
            lines.append(f"# event t={_fmt_t(t_ev)} {label}")
        lines.append(",".join(_fmt(v) for v in row))
    for t_ev, label in pending:
        lines.append(f"# event t={_fmt_t(t_ev)} {label}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> RunLog:
    name = kind = ""
    header = None
    events = []
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line:
            continue
        if line.startswith("#"):
            if mt := _META_RE.match(line):
                name, kind = mt.groups()
            elif mt := _EVENT_RE.match(line):
                events.append((float(mt.group(1)), mt.group(2)))
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no CSV header found")
    n = sum(1 for c in header if re.fullmatch(r"x\d+", c))
    m = sum(1 for c in header if re.fullmatch(r"u\d+", c))
    k = sum(1 for c in header if c.startswith("theta_"))
    if header != column_names(n, m, k):
        raise ValueError(f"{path}: unexpected header {header}")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return RunLog(n=n, m=m, k=k, data=data, events=events, name=name, measurement_kind=kind)


_PLOT_TEMPLATE = '''\
"""Plot the time series in {csv_name} (generated by aacsim)."""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
csv_path = Path(sys.argv[1]) if len(sys.argv) > 1 else here / {csv_name!r}
out_path = Path(sys.argv[2]) if len(sys.argv) > 2 else csv_path.with_suffix(".png")

data = np.genfromtxt(csv_path, delimiter=",", names=True, comments="#")
events = []
for line in csv_path.read_text().splitlines():
    if line.startswith("# event t="):
        t_ev, label = line[len("# event t="):].split(" ", 1)
        events.append((float(t_ev), label))

t = data["t"]
fig, axes = plt.subplots(4, 1, figsize=(8, 10), sharex=True)
for name in {state_cols!r}:
    axes[0].plot(t, data[name], label=name)
axes[0].set_ylabel("state")
for name in {input_cols!r}:
    axes[1].plot(t, data[name], label=name)
axes[1].set_ylabel("control input")
for name in {theta_cols!r}:
    axes[2].plot(t, data[name], lw=0.8)
axes[2].set_ylabel("theta_hat")
axes[3].plot(t, data["lambda"])
axes[3].set_ylabel("lambda_hat")
axes[3].set_xlabel("t [s]")
for ax in axes:
    for t_ev, _ in events:
        ax.axvline(t_ev, color="k", ls=":", lw=0.8)
axes[0].legend(loc="upper right")
axes[1].legend(loc="upper right")
fig.suptitle({title!r})
fig.tight_layout()
fig.savefig(out_path, dpi=120)
print(out_path)
'''


def emit_plot_script(log: RunLog, path, csv_name=None) -> Path:
    """Write a standalone matplotlib script that plots the CSV export of ``log``."""
    path = Path(path)
    cols = log.columns
    script = _PLOT_TEMPLATE.format(
        csv_name=csv_name or path.with_suffix(".csv").name,
        state_cols=[c for c in cols if re.fullmatch(r"x\d+", c)],
        input_cols=[c for c in cols if re.fullmatch(r"u\d+", c)],
        theta_cols=[c for c in cols if c.startswith("theta_")],
        title=log.name or "aacsim run",
    )
    path.write_text(script)
    return path
