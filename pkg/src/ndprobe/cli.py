"""Command-line front end.

Four subcommands, all deterministic for fixed flags and seed:

* ``sweep``           - correlation panel of the XX model over a gt grid,
                        emitted as CSV (or JSON) rows.
* ``validate``        - structure / extraction verdict for a coupling read
                        from a JSON matrix file.
* ``estimate``        - finite-shot readout of x from sigma_y sampling.
* ``verify-theorems`` - randomized checks of the non-demolition, zero
                        entanglement, one-sided discord, first-order
                        necessity and qudit-generalization claims.

Exit codes: 0 success, 1 domain/validation failure, 2 usage/parse failure.

Matrix file format: ``{"dim": n, "re": [[...]], "im": [[...]]}`` with ``im``
optional (defaults to zero).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import correlations, linalg
from .correlations import correlation_panel, cq_residual_min, quantum_discord
from .linalg import frobenius_distance, frobenius_norm, partial_trace, tensor_product, unitary_exp
from .probing import (
    CANONICAL_PROBES,
    GeneralizedProbeSpec,
    IllConditionedTimeError,
    estimate_x,
    estimate_x_sampled,
    evolve_generalized,
    evolve_joint,
    first_order_delta,
    generalized_probed_state,
    probed_state,
    random_density,
    random_unitary,
    random_valid_hamiltonian,
    random_violating_hamiltonian,
    validate_hamiltonian,
    xx_final_state,
)
from .states import KET_0, projector, validate_density

CSV_HEADER = "gt,x,I,C,Q,D_geom,negativity,S_u,S_pf,S_f,C_over_I,Q_over_I"
RATIO_FLOOR = 1e-12
MAX_REPORTED_FAILURES = 10


class MatrixFileError(ValueError):
    """Matrix file could not be parsed into a usable operator."""


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def load_matrix_json(path: str) -> np.ndarray:
    """Read a complex matrix from ``{"dim": n, "re": ..., "im": ...}``."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "dim" not in data or "re" not in data:
        raise MatrixFileError(f"{path}: expected an object with 'dim' and 're' fields")
    n = int(data["dim"])
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros((n, n))), dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise MatrixFileError(
            f"{path}: 're'/'im' must be {n}x{n}, got {re.shape} and {im.shape}"
        )
    return re + 1j * im


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


@dataclass(frozen=True)
class SweepRow:
    """One grid point of the correlation sweep (all entropies in bits)."""

    gt: float
    x: float
    mutual_information: float
    classical_correlation: float
    discord: float
    geometric_discord: float
    negativity: float
    entropy_probed: float
    entropy_probe: float
    entropy_joint: float
    classical_ratio: float
    discord_ratio: float

    def ordered_values(self) -> tuple[float, ...]:
        return (
            self.gt,
            self.x,
            self.mutual_information,
            self.classical_correlation,
            self.discord,
            self.geometric_discord,
            self.negativity,
            self.entropy_probed,
            self.entropy_probe,
            self.entropy_joint,
            self.classical_ratio,
            self.discord_ratio,
        )


def sweep_rows(x: float, g: float, t_max: float, points: int) -> list[SweepRow]:
    """Correlation panel of the XX model on ``points`` times in [0, t_max].

    Ratios C/I and Q/I are reported as 0 where I < 1e-12 (the 0/0 endpoint
    of the sweep) rather than interpolated.
    """
    if points < 2:
        raise ValueError(f"points must be at least 2, got {points}")
    rows = []
    for t in np.linspace(0.0, float(t_max), int(points)):
        state = xx_final_state(x, g, t)
        panel = correlation_panel(state, measured_side=1)
        total = panel.mutual_information
        if total < RATIO_FLOOR:
            c_ratio, q_ratio = 0.0, 0.0
        else:
            c_ratio = panel.classical_correlation / total
            q_ratio = panel.discord / total
        rows.append(
            SweepRow(
                gt=float(g) * float(t),
                x=float(x),
                mutual_information=panel.mutual_information,
                classical_correlation=panel.classical_correlation,
                discord=panel.discord,
                geometric_discord=panel.geometric_discord,
                negativity=panel.negativity,
                entropy_probed=panel.entropy_probed,
                entropy_probe=panel.entropy_probe,
                entropy_joint=panel.entropy_joint,
                classical_ratio=c_ratio,
                discord_ratio=q_ratio,
            )
        )
    return rows


def _rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row.ordered_values()))
    return "\n".join(lines) + "\n"


def _rows_to_json(rows: list[SweepRow]) -> str:
    keys = CSV_HEADER.split(",")
    payload = [dict(zip(keys, row.ordered_values())) for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def _emit(text: str, out_path: str | None) -> int:
    if out_path is None:
        sys.stdout.write(text)
        return 0
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {out_path}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.points < 2:
        print("error: --points must be at least 2", file=sys.stderr)
        return 2
    if not 0.0 <= args.x < 1.0:
        print("error: --x must lie in [0, 1)", file=sys.stderr)
        return 2
    rows = sweep_rows(args.x, args.g, args.t_max, args.points)
    text = _rows_to_json(rows) if args.format == "json" else _rows_to_csv(rows)
    return _emit(text, args.out)


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        h = load_matrix_json(args.hamiltonian)
        probe = load_matrix_json(args.probe)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(
            f"error: parse failure at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return 2
    except MatrixFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        rho_p = validate_density(probe, dims=(2,))
        report = validate_hamiltonian(h, rho_p)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = {
        "structure_ok": report.structure_ok,
        "extraction_ok": report.extraction_ok,
        "ok": report.ok,
        "c0": report.c0,
        "extraction_norm": report.extraction_norm,
        "violations": [
            {"name": name, "magnitude": magnitude} for name, magnitude in report.violations
        ],
        "a_part": matrix_to_json(report.a_part),
        "b_part": matrix_to_json(report.b_part),
    }
    print(json.dumps(payload, indent=2))
    return 0 if report.ok else 1


def cmd_estimate(args: argparse.Namespace) -> int:
    if args.shots < 1:
        print("error: --shots must be at least 1", file=sys.stderr)
        return 2
    if not 0.0 <= args.x < 1.0:
        print("error: --x must lie in [0, 1)", file=sys.stderr)
        return 2
    try:
        x_hat, std_error = estimate_x_sampled(args.x, args.g, args.t, args.shots, args.seed)
    except IllConditionedTimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    payload = {
        "x_hat": x_hat,
        "std_error": std_error,
        "shots": args.shots,
        "gt": args.g * args.t,
        "seed": args.seed,
    }
    print(json.dumps(payload, indent=2))
    return 0


# ---------------------------------------------------------------------------
# randomized verification suites
# ---------------------------------------------------------------------------


def _stable_seed(*parts) -> int:
    payload = "::".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


def _trial_rng(trial_seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed))


def _generic_reduction_error(h: np.ndarray, x: float, rho_p: np.ndarray, t: float) -> float:
    u = unitary_exp(h, t)
    joint = tensor_product(probed_state(x).matrix, rho_p)
    final = u @ joint @ u.conj().T
    return frobenius_distance(partial_trace(final, (2, 2), 0), probed_state(x).matrix)


def _prop_non_demolition(trial_seed: int, fault: bool) -> tuple[bool, dict]:
    rng = _trial_rng(trial_seed)
    if fault:
        h, _ = random_violating_hamiltonian(rng)
    else:
        h = random_valid_hamiltonian(rng)
    rho_p = random_density(rng, 2).matrix
    x = float(rng.uniform(0.0, 0.95))
    t_max = 2.0 * np.pi / max(frobenius_norm(h), 1e-6)
    worst = 0.0
    for t in rng.uniform(0.0, t_max, size=5):
        if fault:
            deviation = _generic_reduction_error(h, x, rho_p, float(t))
        else:
            final = evolve_joint(x, h, rho_p, float(t))
            deviation = frobenius_distance(
                partial_trace(final.matrix, (2, 2), 0), probed_state(x).matrix
            )
        worst = max(worst, deviation)
    return worst < 1e-10, {"worst_deviation": worst, "x": x}


def _prop_probe_independence(trial_seed: int, fault: bool) -> tuple[bool, dict]:
    rng = _trial_rng(trial_seed)
    h = random_valid_hamiltonian(rng)
    x = float(rng.uniform(0.0, 0.95))
    t = float(rng.uniform(0.0, 2.0 * np.pi / max(frobenius_norm(h), 1e-6)))
    reference = None
    worst = 0.0
    for _ in range(5):
        rho_p = random_density(rng, 2).matrix
        reduction = partial_trace(evolve_joint(x, h, rho_p, t).matrix, (2, 2), 0)
        if reference is None:
            reference = reduction
        else:
            worst = max(worst, frobenius_distance(reduction, reference))
    return worst < 1e-10, {"worst_spread": worst, "x": x, "t": t}


def _prop_zero_negativity(trial_seed: int, fault: bool) -> tuple[bool, dict]:
    rng = _trial_rng(trial_seed)
    h = random_valid_hamiltonian(rng)
    rho_p = random_density(rng, 2).matrix
    x = float(rng.uniform(0.0, 0.95))
    t = float(rng.uniform(0.0, 2.0 * np.pi / max(frobenius_norm(h), 1e-6)))
    value = correlations.negativity(evolve_joint(x, h, rho_p, t))
    return value < 1e-10, {"negativity": value, "x": x, "t": t}


def _prop_one_sided_discord(trial_seed: int, fault: bool) -> tuple[bool, dict]:
    rng = _trial_rng(trial_seed)
    h = random_valid_hamiltonian(rng)
    rho_p = random_density(rng, 2).matrix
    x = float(rng.uniform(0.1, 0.9))
    t = float(rng.uniform(0.1, 2.0))
    state = evolve_joint(x, h, rho_p, t)
    probed_discord = quantum_discord(state, measured_side=0)
    plus_basis = correlations.MeasurementBasis(np.pi / 2.0, 0.0)
    probed_residual = correlations.cq_residual(state, plus_basis, side=0)

    x2 = float(rng.uniform(0.25, 0.75))
    gt2 = float(rng.uniform(0.1, np.pi / 4.0 - 0.1))
    xx_state = xx_final_state(x2, 1.0, gt2)
    probe_discord = quantum_discord(xx_state, measured_side=1)
    probe_residual, _ = cq_residual_min(xx_state, side=1)
    ok = (
        probed_discord < 1e-6
        and probed_residual < 1e-9
        and probe_discord > 1e-4
        and probe_residual > 1e-4
    )
    return ok, {
        "probed_discord": probed_discord,
        "probed_residual": probed_residual,
        "probe_discord": probe_discord,
        "probe_residual": probe_residual,
        "x_xx": x2,
        "gt_xx": gt2,
    }


def _prop_delta_scaling(trial_seed: int, fault: bool) -> tuple[bool, dict]:
    rng = _trial_rng(trial_seed)
    h_bad, _ = random_violating_hamiltonian(rng)
    h_good = random_valid_hamiltonian(rng)
    x = float(rng.uniform(0.1, 0.9))
    probe = max(
        CANONICAL_PROBES, key=lambda rho_p: first_order_delta(h_bad, x, rho_p)
    )
    steps = (1e-2, 1e-3, 1e-4)
    rates = [_generic_reduction_error(h_bad, x, probe, dt) / dt for dt in steps]
    valid_disturbance = _generic_reduction_error(h_good, x, probe, 1e-2)
    # rates converge to the first-order coefficient; 1e-2 may still carry
    # visible curvature, the last two must agree to ~1%
    ok = (
        rates[2] > 1e-4
        and abs(rates[1] - rates[2]) < 0.05 * rates[2]
        and valid_disturbance < 1e-10
    )
    return ok, {
        "rates": rates,
        "valid_disturbance": valid_disturbance,
        "x": x,
    }


def _qutrit_weights(x: float) -> np.ndarray:
    return np.array([(1.0 + 2.0 * x) / 3.0, (1.0 - x) / 3.0, (1.0 - x) / 3.0])


def _prop_qutrit_probe(trial_seed: int, fault: bool) -> tuple[bool, dict]:
    rng = _trial_rng(trial_seed)
    x = float(rng.uniform(0.0, 0.95))
    g = float(rng.uniform(0.3, 1.5))
    g_t = np.array([1.0, -1.0, 0.0])

    frame = random_unitary(rng, 3)
    spec_rot = GeneralizedProbeSpec(
        n=3, eigenvectors=frame, probabilities=_qutrit_weights, g_t=g_t
    )
    b_rand = np.zeros((2, 2), dtype=complex)
    for coeff, pauli in zip(rng.uniform(-1.0, 1.0, size=3), linalg.PAULIS):
        b_rand = b_rand + coeff * pauli
    rho_p = random_density(rng, 2).matrix
    worst = 0.0
    target = generalized_probed_state(spec_rot, x).matrix
    for t in (0.1, 0.5, 2.0):
        final = evolve_generalized(spec_rot, x, g * linalg.SIGMA_X, b_rand, rho_p, t)
        worst = max(worst, frobenius_distance(partial_trace(final.matrix, (3, 2), 0), target))

    spec_plain = GeneralizedProbeSpec(
        n=3,
        eigenvectors=np.eye(3, dtype=complex),
        probabilities=_qutrit_weights,
        g_t=g_t,
    )
    t_star = float(rng.uniform(0.2, 0.6)) * np.pi / (2.0 * g)
    final = evolve_generalized(
        spec_plain, x, g * linalg.SIGMA_X, np.zeros((2, 2)), projector(KET_0), t_star
    )
    x_hat = estimate_x(partial_trace(final.matrix, (3, 2), 1), g, t_star)
    ok = worst < 1e-10 and abs(x_hat - x) < 1e-10
    return ok, {"worst_reduction_drift": worst, "x": x, "x_hat": x_hat}


PROPERTIES = {
    "non_demolition": _prop_non_demolition,
    "probe_independence": _prop_probe_independence,
    "zero_negativity": _prop_zero_negativity,
    "one_sided_discord": _prop_one_sided_discord,
    "delta_scaling": _prop_delta_scaling,
    "qutrit_probe": _prop_qutrit_probe,
}


def run_property_trial(name: str, trial_seed: int, fault: bool) -> tuple[bool, dict]:
    return PROPERTIES[name](trial_seed, fault)


def cmd_verify_theorems(args: argparse.Namespace) -> int:
    if args.replay is not None:
        return _replay(args.replay)
    if args.trials < 1:
        print("error: --trials must be at least 1", file=sys.stderr)
        return 2
    results = {}
    failures = []
    for name in PROPERTIES:
        fault = bool(args.inject_fault) and name == "non_demolition"
        passed = failed = 0
        for trial in range(args.trials):
            trial_seed = _stable_seed(args.seed, name, trial)
            ok, details = run_property_trial(name, trial_seed, fault)
            if ok:
                passed += 1
            else:
                failed += 1
                if len(failures) < MAX_REPORTED_FAILURES:
                    failures.append(
                        {
                            "property": name,
                            "trial": trial,
                            "trial_seed": trial_seed,
                            "fault": fault,
                            "details": details,
                        }
                    )
        results[name] = {"pass": passed, "fail": failed}
    all_pass = all(r["fail"] == 0 for r in results.values())
    payload = {
        "seed": args.seed,
        "trials": args.trials,
        "fault_injected": bool(args.inject_fault),
        "properties": results,
        "all_pass": all_pass,
        "failures": failures,
    }
    print(json.dumps(payload, indent=2))
    return 0 if all_pass else 1


def _replay(path: str) -> int:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            record = json.load(fh)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(
            f"error: parse failure at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return 2
    if isinstance(record, dict) and "failures" in record:
        if not record["failures"]:
            print("error: no failures recorded in summary", file=sys.stderr)
            return 2
        record = record["failures"][0]
    name = record.get("property")
    if name not in PROPERTIES:
        print(f"error: unknown property {name!r}", file=sys.stderr)
        return 2
    ok, details = run_property_trial(name, int(record["trial_seed"]), bool(record["fault"]))
    payload = {
        "property": name,
        "trial": record.get("trial"),
        "trial_seed": int(record["trial_seed"]),
        "fault": bool(record["fault"]),
        "reproduced_failure": not ok,
        "details": details,
    }
    print(json.dumps(payload, indent=2))
    return 1 if not ok else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndprobe",
        description="Non-demolition probing simulator and correlation analyzer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="correlation panel of the XX model over gt")
    p_sweep.add_argument("--x", type=float, default=0.5, help="hidden parameter in [0, 1)")
    p_sweep.add_argument("--g", type=float, default=1.0, help="coupling strength")
    p_sweep.add_argument("--t-max", type=float, default=float(np.pi / 2.0), dest="t_max")
    p_sweep.add_argument("--points", type=int, default=129)
    p_sweep.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="check a coupling against the structure conditions")
    p_val.add_argument("--hamiltonian", type=str, required=True, help="JSON matrix file (4x4)")
    p_val.add_argument("--probe", type=str, required=True, help="JSON matrix file (2x2 density)")
    p_val.set_defaults(func=cmd_validate)

    p_est = sub.add_parser("estimate", help="finite-shot estimation of x")
    p_est.add_argument("--x", type=float, required=True, help="true hidden parameter")
    p_est.add_argument("--g", type=float, default=1.0)
    p_est.add_argument("--t", type=float, required=True)
    p_est.add_argument("--shots", type=int, required=True)
    p_est.add_argument("--seed", type=int, required=True)
    p_est.set_defaults(func=cmd_estimate)

    p_ver = sub.add_parser("verify-theorems", help="randomized verification suite")
    p_ver.add_argument("--trials", type=int, default=100)
    p_ver.add_argument("--seed", type=int, default=1)
    p_ver.add_argument(
        "--inject-fault",
        action="store_true",
        help="replace valid couplings with violating ones in the non-demolition suite",
    )
    p_ver.add_argument("--replay", type=str, default=None, help="re-run a serialized failure")
    p_ver.set_defaults(func=cmd_verify_theorems)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # exit codes are contractual: 0, 1, 2 only
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
