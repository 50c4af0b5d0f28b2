"""Report records and rendering.

Every report is first assembled into one ordered, JSON-compatible record;
the JSON and table renderers both read from that record, so the two views
cannot diverge. Tables round to six significant digits, JSON keeps full
double precision.

The ``reference_tables`` record reproduces the published case-study tables
for the two built-in models (values scaled by 1e3 there, as in the source
tables). The bound convention in all reports: per-parameter
distances ``Delta_i`` bound the exact delta by ``sum_i kappa_i * Delta_i``
(equivalently ``kappa_w * Delta`` for the induced direction); this is an
interpretation of the published single-number convention and is labeled
explicitly rather than collapsed into one figure.
"""

from __future__ import annotations

import json
import os
import sys

from .example_models import build_frog, build_zeroconf
from .model import Assignment
from .perturbation import SensitivityReport, analyze
from .reachability import ReachabilityProblem, canonicalize
from .sampler import ValidationReport, validate_bounds

BOUND_CONVENTION = ("per-parameter distances Delta_i bound the exact delta by "
                    "sum_i kappa_i * Delta_i = kappa_w * Delta with "
                    "w(i) = Delta_i / Delta")


def _fmt(x: float) -> str:
    """Six significant digits for table cells."""
    return f"{x:.6g}"


def _problem_record(problem: ReachabilityProblem) -> dict:
    return {"constraint": sorted(problem.constraint),
            "destination": sorted(problem.destination)}


def use_color(stream=None) -> bool:
    """Color only on a tty and when ``NO_COLOR`` is unset."""
    stream = stream if stream is not None else sys.stdout
    if os.environ.get("NO_COLOR"):
        return False
    return bool(getattr(stream, "isatty", lambda: False)())


def _mark(text: str, color: bool) -> str:
    return f"\x1b[31m{text}\x1b[0m" if color else text


def render_json(record: dict) -> str:
    return json.dumps(record, indent=2) + "\n"


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return lines


# ---------------------------------------------------------------------------
# sensitivity

def sensitivity_record(report: SensitivityReport) -> dict:
    return {
        "model_hash": report.model_hash,
        "problem": _problem_record(report.problem),
        "probability": report.probability,
        "parameters": [
            {
                "id": pid,
                "kappa": kappa,
                "h": list(map(float, report.gradients.h[pid])),
            }
            for pid, kappa in report.kappa_by_parameter.items()
        ],
        "direction": dict(report.direction.weights),
        "kappa_directional": report.kappa_directional,
        "kappa_sum": report.kappa_sum,
        "bound_convention": BOUND_CONVENTION,
    }


def render_sensitivity_table(report: SensitivityReport) -> str:
    lines = [
        f"model {report.model_hash}, problem "
        f"{sorted(report.problem.constraint)} U {sorted(report.problem.destination)}",
        f"referential probability: {report.probability:.6f}",
        "",
    ]
    rows = [[pid, _fmt(kappa), f"w={_fmt(report.direction.weights[pid])}",
             "[" + ", ".join(_fmt(x) for x in report.gradients.h[pid]) + "]"]
            for pid, kappa in report.kappa_by_parameter.items()]
    lines.extend(_table(["parameter", "kappa_i", "direction", "h"], rows))
    lines.append("")
    lines.append(f"kappa_w   = {_fmt(report.kappa_directional)}"
                 "  (total budget Delta split by the direction)")
    lines.append(f"kappa_sum = {_fmt(report.kappa_sum)}"
                 "  (per-parameter distances: bound sum_i kappa_i * Delta_i)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation

def validation_record(report: ValidationReport, model_hash: str,
                      problem: ReachabilityProblem) -> dict:
    return {
        "model_hash": model_hash,
        "problem": _problem_record(problem),
        "requested_distances": dict(report.requested),
        "bound": report.bound,
        "analytic_kappa": report.analytic_kappa,
        "kappa_sum": report.kappa_sum,
        "empirical_kappa": report.empirical_kappa,
        "violations": report.violations,
        "max_excess": report.max_excess,
        "slack": report.slack,
        "seed": report.seed,
        "bound_convention": BOUND_CONVENTION,
        "samples": [
            {
                "label": s.label,
                "assignment": {pid: list(map(float, vec))
                               for pid, vec in s.assignment.vectors.items()},
                "distances": dict(s.distances),
                "distance": s.distance,
                "exact": s.exact,
                "linear": s.linear,
                "bound": s.bound,
                "exceeds": s.exceeds,
            }
            for s in report.samples
        ],
    }


def render_validation_table(report: ValidationReport, model_hash: str,
                            problem: ReachabilityProblem,
                            color: bool = False, max_rows: int = 20) -> str:
    lines = [
        f"model {model_hash}, problem "
        f"{sorted(problem.constraint)} U {sorted(problem.destination)}",
        f"samples: {len(report.samples)}  seed: {report.seed}",
        f"requested distances: "
        + ", ".join(f"{pid}={_fmt(d)}" for pid, d in report.requested.items()),
        f"bound sum_i kappa_i*Delta_i = {_fmt(report.bound)}"
        f"  (kappa_w = {_fmt(report.analytic_kappa)}, kappa_sum = {_fmt(report.kappa_sum)})",
        f"empirical kappa = {_fmt(report.empirical_kappa)}",
    ]
    if report.violations:
        flagged = _mark(f"{report.violations} sample(s) exceed the bound "
                        f"(max excess {_fmt(report.max_excess)})", color)
        lines.append(flagged)
        rows = [[s.label, _fmt(s.distance), f"{s.exact:+.6g}", f"{s.linear:+.6g}",
                 _fmt(s.bound)]
                for s in report.samples if s.exceeds][:max_rows]
        lines.append("")
        lines.extend(_table(["sample", "distance", "exact", "linear", "bound"], rows))
    else:
        lines.append("no sample exceeds the bound")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# published case-study tables

_ZF_PERTURBED = (0.749, 0.752, 0.747)
_FG_PERTURBED = (
    (0.374, 0.124, 0.251, 0.251),
    (0.374, 0.124, 0.250, 0.252),
    (0.377, 0.125, 0.248, 0.250),
    (0.377, 0.125, 0.250, 0.248),
    (0.375, 0.125, 0.248, 0.252),
    (0.375, 0.125, 0.252, 0.248),
)


def reference_tables_record() -> dict:
    """Both case-study tables as one machine-readable record (values x 1e3)."""
    zf_pmc, zf_problem = build_zeroconf(a=0.2, loss_ref=0.25)
    zf = analyze(zf_pmc, zf_problem)
    zf_cp = canonicalize(zf_pmc, zf_problem)
    zf_rows = []
    for back in _ZF_PERTURBED:
        assignment = Assignment({p.id: (back, 1.0 - back) for p in zf_pmc.parameters})
        delta_i = 2.0 * abs(back - 0.75)
        run = validate_bounds(zf_pmc, zf_cp, {p.id: delta_i for p in zf_pmc.parameters},
                              n_samples=0, seed=0, assignments=[assignment],
                              inject_extremal=False)
        sample = run.samples[0]
        zf_rows.append({
            "back_probability_x1e3": back * 1e3,
            "delta_x1e3": sample.exact * 1e3,
            "distance_per_parameter_x1e3": delta_i * 1e3,
            "range_x1e3": sample.bound * 1e3,
            "exceeds": sample.exceeds,
        })

    fg_pmc, fg_problem = build_frog()
    fg = analyze(fg_pmc, fg_problem)
    fg_cp = canonicalize(fg_pmc, fg_problem)
    fg_rows = []
    for dist in _FG_PERTURBED:
        assignment = Assignment({"hop": dist})
        delta = sum(abs(x - r) for x, r in zip(dist, (0.375, 0.125, 0.25, 0.25)))
        run = validate_bounds(fg_pmc, fg_cp, {"hop": delta}, n_samples=0, seed=0,
                              assignments=[assignment], inject_extremal=False)
        sample = run.samples[0]
        fg_rows.append({
            "distribution_x1e3": [x * 1e3 for x in dist],
            "delta_x1e3": sample.exact * 1e3,
            "distance_x1e3": delta * 1e3,
            "range_x1e3": sample.bound * 1e3,
            "exceeds": sample.exceeds,
        })

    return {
        "scale": "all table values are multiplied by 1e3",
        "bound_convention": BOUND_CONVENTION,
        "zeroconf": {
            "model_hash": zf.model_hash,
            "problem": _problem_record(zf_problem),
            "probability_x1e3": zf.probability * 1e3,
            "kappa_sum_x1e3": zf.kappa_sum * 1e3,
            "kappa_per_parameter_x1e3": {pid: k * 1e3
                                         for pid, k in zf.kappa_by_parameter.items()},
            "perturbed": zf_rows,
        },
        "frog": {
            "model_hash": fg.model_hash,
            "problem": _problem_record(fg_problem),
            "probability_x1e3": fg.probability * 1e3,
            "kappa_x1e3": fg.kappa_sum * 1e3,
            "perturbed": fg_rows,
        },
    }


def render_reference_tables(record: dict, color: bool = False) -> str:
    lines = ["Case-study tables (values x 1e-3)", ""]

    zf = record["zeroconf"]
    lines.append("Noisy address-probing protocol (a = 0.2), problem "
                 f"{zf['problem']['constraint']} U {zf['problem']['destination']}")
    headers = ["Model", "x_i", "Probability", "Distance", "Condition Number",
               "Variation Range"]
    rows = [["ref", "750", f"{zf['probability_x1e3']:.3f}", "-",
             f"{zf['kappa_sum_x1e3']:.3f}", "-"]]
    for index, row in enumerate(zf["perturbed"], start=1):
        flag = " *" if row["exceeds"] else ""
        rows.append([
            f"M{index}",
            f"{row['back_probability_x1e3']:.0f}",
            f"{row['delta_x1e3']:+.3f}",
            f"{row['distance_per_parameter_x1e3']:.0f}",
            "-",
            _mark(f"+-{row['range_x1e3']:.3f}{flag}", color and row["exceeds"]),
        ])
    lines.extend(_table(headers, rows))
    lines.append("")

    fg = record["frog"]
    lines.append("Hopping frog, problem "
                 f"{fg['problem']['constraint']} U {fg['problem']['destination']}")
    headers = ["Model", "Distribution", "Probability", "Distance",
               "Condition Number", "Variation Range"]
    rows = [["ref", "(375, 125, 250, 250)", f"{fg['probability_x1e3']:.3f}", "-",
             f"{fg['kappa_x1e3']:.3f}", "-"]]
    for index, row in enumerate(fg["perturbed"], start=1):
        flag = " *" if row["exceeds"] else ""
        dist = "(" + ", ".join(f"{x:.0f}" for x in row["distribution_x1e3"]) + ")"
        rows.append([
            f"M{index}",
            dist,
            f"{row['delta_x1e3']:+.3f}",
            f"{row['distance_x1e3']:.0f}",
            "-",
            _mark(f"+-{row['range_x1e3']:.3f}{flag}", color and row["exceeds"]),
        ])
    lines.extend(_table(headers, rows))
    lines.append("")
    lines.append("* exact delta exceeds the first-order variation range")
    lines.append(f"bound convention: {record['bound_convention']}")
    return "\n".join(lines) + "\n"
