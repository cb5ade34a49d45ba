"""Execute run configurations: simulate, tabulate, write, and cross-check."""

from __future__ import annotations

import copy
import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from .config import RunConfig, parse_config
from .dynamics import StepOperator, Trajectory, evolve
from .errors import ConfigError, NumericIntegrityError, ParameterError
from .signal import (
    ORACLE_RANK_CAP,
    HeisenbergNet,
    Labstate,
    one_signal_amplitudes,
    oracle_evolve_one_signal,
)
from .scenarios import ammonium, decay, kaon

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INTEGRITY = 2

ROW_TOLERANCE = 1e-10
CROSSCHECK_TOLERANCE = 1e-12

StepHook = Callable[[int, StepOperator], StepOperator]


def _hooked(schedule: Iterable[StepOperator], hook: StepHook | None) -> Iterator[StepOperator]:
    if hook is None:
        return iter(schedule)
    return (hook(n, op) for n, op in enumerate(schedule, start=1))


def _setup(config: RunConfig, n_mesh: int | None = None):
    """Initial state, schedule and tau for a config (zeno needs the mesh size)."""
    if config.scenario == "decay":
        return decay.decay_initial_state(), decay.decay_schedule(config.model), config.tau
    if config.scenario == "zeno":
        tau = config.model["t"] / n_mesh
        p = decay.DecayParams.zeno(config.model["gamma"], tau)
        return decay.decay_initial_state(), decay.decay_schedule(p), tau
    if config.scenario == "ammonium":
        return ammonium.ammonium_initial_state(), ammonium.ammonium_schedule(config.model), config.tau
    params, psi0 = config.model
    return kaon.kaon_initial_state(psi0), kaon.kaon_schedule(params), config.tau


@dataclass
class Table:
    columns: list[str]
    rows: list[dict[str, float | int | None]]

    def max_residual(self) -> float:
        return max((abs(r["conservation_residual"]) for r in self.rows), default=0.0)


def _history_columns(traj: Trajectory) -> list[str]:
    return [lab for lab in traj.final_labels if lab not in traj.tracked]


def _trajectory_rows(config: RunConfig, traj: Trajectory, closed) -> Table:
    tracked = list(traj.tracked)
    history = _history_columns(traj) if config.verbose_z_channels else []
    closed_names = list(closed(0).keys())
    columns = (
        ["n", "t_seconds"]
        + [f"Pr_{lab}" for lab in tracked + history]
        + ["cumulative_decayed"]
        + closed_names
        + ["conservation_residual"]
    )
    probs = traj.tracked_probabilities
    rows = []
    for n in range(len(traj)):
        row: dict = {"n": n, "t_seconds": n * traj.tau}
        for j, lab in enumerate(tracked):
            row[f"Pr_{lab}"] = float(probs[n, j])
        if history:
            labels = traj.labels_at(n)
            state = traj.state_at(n)
            present = {lab: i for i, lab in enumerate(labels)}
            for lab in history:
                i = present.get(lab)
                row[f"Pr_{lab}"] = None if i is None else float(abs(state[i]) ** 2)
        row["cumulative_decayed"] = float(traj.decayed[n])
        row.update(closed(n))
        row["conservation_residual"] = float(traj.residuals[n])
        rows.append(row)
    return Table(columns, rows)


def build_table(config: RunConfig, step_hook: StepHook | None = None) -> Table:
    """Simulate ``config`` and tabulate simulated alongside closed-form columns.

    Raises NumericIntegrityError if the engine detects a conservation breach.
    """
    verbose = config.verbose_z_channels
    if config.scenario == "zeno":
        gamma, t = config.model["gamma"], config.model["t"]
        columns = ["n", "t_seconds", "Pr_X", "cumulative_decayed", "closed_Pr_X", "conservation_residual"]
        rows = []
        for n in config.model["n_list"]:
            initial, schedule, tau = _setup(config, n)
            traj = evolve(initial, _hooked(schedule, step_hook), n, tau)
            rows.append({
                "n": n,
                "t_seconds": t,
                "Pr_X": float(traj.tracked_probabilities[-1, 0]),
                "cumulative_decayed": float(traj.decayed[-1]),
                "closed_Pr_X": decay.zeno_survival(gamma, t, n),
                "conservation_residual": float(traj.residuals[-1]),
            })
        return Table(columns, rows)

    initial, schedule, tau = _setup(config)
    traj = evolve(initial, _hooked(schedule, step_hook), config.n_steps, tau, verbose=verbose)

    if config.scenario == "decay":
        p = config.model

        def closed(n):
            return {"closed_Pr_X": decay.decay_survival_closed(p, n)}

    elif config.scenario == "ammonium":
        p = config.model

        def closed(n):
            if p.degenerate:
                # |Re a| = 1 forces b = 0: the step is diagonal
                pxx, pyx = 1.0, 0.0
            else:
                pxx, pyx = ammonium.ammonium_probs_closed(p.u, p.v, p.theta, n)
            return {"closed_Pr_X": pxx, "closed_Pr_Y": pyx}

    else:
        params, psi0 = config.model
        modes = kaon.kaon_eigenmodes(params, psi0)

        def closed(n):
            px, py = kaon.kaon_survival_closed(modes, n)
            return {"closed_Pr_X": px, "closed_Pr_Y": py}

    return _trajectory_rows(config, traj, closed)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(row.get(c)) for c in table.columns])
    return buf.getvalue()


def _json_value(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError("non-finite value in output")
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(table: Table, config: RunConfig) -> str:
    lines = ['{"header": ' + _json_value({"config": config.header(), "columns": table.columns}) + ",",
             ' "rows": [']
    body = [
        "  " + _json_value({c: row.get(c) for c in table.columns}) for row in table.rows
    ]
    lines.append(",\n".join(body))
    lines.append("]}")
    return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    exit_code: int
    output_path: Path | None
    message: str = ""
    table: Table | None = field(default=None, repr=False)


def run(config: RunConfig, step_hook: StepHook | None = None, output_path=None) -> RunResult:
    """Simulate and write output; exit code 2 on any conservation failure."""
    out = Path(output_path) if output_path is not None else config.output_path
    try:
        table = build_table(config, step_hook)
    except NumericIntegrityError as exc:
        return RunResult(EXIT_INTEGRITY, None, f"numeric-integrity failure at step {exc.step}: {exc}")
    except (ParameterError, ConfigError) as exc:
        return RunResult(EXIT_VALIDATION, None, str(exc))

    text = render_csv(table) if config.output_format == "csv" else render_json(table, config)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)

    for row in table.rows:
        if abs(row["conservation_residual"]) > ROW_TOLERANCE:
            return RunResult(
                EXIT_INTEGRITY, out,
                f"numeric-integrity failure at step {row['n']}: residual {row['conservation_residual']:.3e}",
                table,
            )
    return RunResult(EXIT_OK, out, f"wrote {len(table.rows)} rows to {out}", table)


@dataclass
class CrosscheckReport:
    scenario: str
    steps_checked: int
    final_rank: int
    max_deviation: float
    passed: bool
    truncated_at: int | None = None

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (f"{status} {self.scenario}: {self.steps_checked} steps, final rank {self.final_rank}, "
                f"max amplitude deviation {self.max_deviation:.3e}")
        if self.truncated_at is not None:
            line += f" (truncated at step {self.truncated_at}: rank would exceed the oracle cap)"
        return line


def crosscheck(config: RunConfig, max_rank: int = ORACLE_RANK_CAP) -> CrosscheckReport:
    """Run the matrix path and the dense tensor-product oracle side by side."""
    if not 1 <= max_rank <= ORACLE_RANK_CAP:
        raise ParameterError(f"max_rank must be in [1, {ORACLE_RANK_CAP}], got {max_rank}")
    if config.scenario == "zeno":
        n_steps = config.model["n_list"][0]
        initial, schedule, tau = _setup(config, n_steps)
    else:
        n_steps = config.n_steps
        initial, schedule, tau = _setup(config)

    ops = []
    truncated = None
    for n, op in zip(range(1, n_steps + 1), schedule):
        if op.target_rank > max_rank:
            truncated = n
            break
        ops.append(op)

    traj = evolve(initial, ops, len(ops), tau, verbose=True)
    oracle: Labstate = initial
    max_dev = 0.0
    for n, op in enumerate(ops, start=1):
        oracle = oracle_evolve_one_signal(op.matrix, oracle, HeisenbergNet(n, op.target_labels), cap=max_rank)
        dev = float(np.max(np.abs(one_signal_amplitudes(oracle) - traj.state_at(n)), initial=0.0))
        max_dev = max(max_dev, dev)
    return CrosscheckReport(
        scenario=config.scenario,
        steps_checked=len(ops),
        final_rank=len(traj.final_labels),
        max_deviation=max_dev,
        passed=max_dev <= CROSSCHECK_TOLERANCE,
        truncated_at=truncated,
    )


_TOP_LEVEL_SWEEPABLE = {"n_steps", "tau", "seed"}


def sweep_configs(config: RunConfig, param: str, values: list) -> list[RunConfig]:
    """One validated config per value; ``param`` is a top-level field or a parameter name."""
    name = param.removeprefix("parameters.")
    out = []
    for value in values:
        raw = copy.deepcopy(config.raw)
        if name in _TOP_LEVEL_SWEEPABLE and not param.startswith("parameters."):
            raw[name] = value
        else:
            raw.setdefault("parameters", {})[name] = value
        base = config.output_path
        raw["output_path"] = str(base.with_name(f"{base.stem}_{name}={_fmt_value(value)}{base.suffix}"))
        out.append(parse_config(raw, f"sweep {name}={value}"))
    return out


def _fmt_value(value) -> str:
    return value if isinstance(value, str) else json.dumps(value).replace(" ", "")


def sweep(config: RunConfig, param: str, values: list, workers: int = 1) -> list[RunResult]:
    configs = sweep_configs(config, param, values)
    if workers <= 1:
        return [run(c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, configs))
