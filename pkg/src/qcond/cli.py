"""``qitool``: command-line front end for states, entropies and checks.

Exit codes: 0 success, 1 a requested physical expectation did not hold,
2 usage error (bad arguments, unknown names or labels), 3 data error
(unreadable or invalid state file).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import entcalc, qstate
from .errors import (
    EmptyKeep,
    PartitionError,
    QcondError,
    UnknownLabel,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3

STATE_NAMES = ("bell0", "bell1", "bell2", "bell3", "ghz3", "caseI", "caseII", "mixed", "separable")


class UsageError(Exception):
    pass


def make_named_state(name: str, seed: int = 0) -> qstate.DensityMatrix:
    if name.startswith("bell") and name[4:] in ("0", "1", "2", "3"):
        return qstate.bell_state(int(name[4:]))
    if name == "ghz3":
        return qstate.ghz_state(3)
    if name == "caseI":
        half = qstate.maximally_mixed([("A", 2)])
        return qstate.product_state([half, qstate.maximally_mixed([("B", 2)])])
    if name == "caseII":
        return qstate.classical_mixture([0.5, 0.5], ["00", "11"], qstate.SystemShape.qubits("AB"))
    if name == "mixed":
        return qstate.random_mixed(seed)
    if name == "separable":
        return qstate.random_separable(seed)
    raise UsageError(f"unknown state {name!r}; choose from {', '.join(STATE_NAMES)}")


# --- rendering --------------------------------------------------------------

def fixed(x: float) -> str:
    """6-decimal fixed point with negative zero suppressed."""
    return f"{round(float(x), 6) + 0.0:.6f}"


def compact(x: float) -> str:
    s = fixed(x).rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def group(labels) -> str:
    labels = list(labels)
    return "".join(labels) if all(len(lbl) == 1 for lbl in labels) else ",".join(labels)


def _clean(x: float) -> float:
    return float(x) + 0.0


def emit_json(doc) -> None:
    print(json.dumps(doc, indent=2))


def _partition(args, rho) -> entcalc.Partition:
    if args.partition:
        return entcalc.Partition.parse(args.partition)
    if len(rho.labels) == 2:
        return entcalc.Partition((rho.labels[0],), (rho.labels[1],))
    raise UsageError(f"--partition is required for a state with labels {list(rho.labels)}")


def _load(args) -> qstate.DensityMatrix:
    if not args.inp:
        raise UsageError("--in PATH is required")
    return qstate.load_state(args.inp)


def _labels(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


# --- commands ---------------------------------------------------------------

def cmd_make(args) -> int:
    rho = make_named_state(args.name, args.seed)
    if args.out:
        qstate.save_state(rho, args.out)
        print(f"wrote {args.name} to {args.out}")
    else:
        sys.stdout.write(qstate.dumps_state(rho))
    return EXIT_OK


def cmd_entropy(args) -> int:
    rho = _load(args)
    part = _partition(args, rho)
    d = entcalc.bipartite_diagram(rho, part)
    a, b = group(part.side_a), group(part.side_b)
    union = set(part.side_a + part.side_b)
    ab = group(lbl for lbl in rho.labels if lbl in union)
    rows = [
        (f"S({a})", d.s_a),
        (f"S({b})", d.s_b),
        (f"S({ab})", d.s_ab),
        (f"S({a}|{b})", d.s_a_given_b),
        (f"S({b}|{a})", d.s_b_given_a),
        (f"S({a}:{b})", d.s_mutual),
    ]
    if args.format == "json":
        emit_json({"partition": str(part), "unit": "bits",
                   "entropies": {k: _clean(v) for k, v in rows}})
    else:
        sep = "\t" if args.format == "tsv" else " = "
        for k, v in rows:
            print(f"{k}{sep}{fixed(v)}")
    return EXIT_OK


def cmd_diagram(args) -> int:
    rho = _load(args)
    labels = _labels(args.labels) if args.labels else list(rho.labels)
    if len(labels) == 2:
        d = entcalc.bipartite_diagram(rho, entcalc.Partition((labels[0],), (labels[1],)))
        a, b = labels
        regions = [(f"S({a}|{b})", d.s_a_given_b), (f"S({a}:{b})", d.s_mutual), (f"S({b}|{a})", d.s_b_given_a)]
        triple = "(" + ", ".join(compact(v) for v in d.triple) + ")"
    elif len(labels) == 3:
        t = entcalc.ternary_diagram(rho, labels)
        regions = list(t.regions().items())
        triple = None
    else:
        raise UsageError(f"diagram needs 2 or 3 labels, got {labels}")

    if args.format == "json":
        doc = {"labels": labels, "unit": "bits", "regions": {k: _clean(v) for k, v in regions}}
        if triple:
            doc["triple"] = [_clean(v) for v in d.triple]
        emit_json(doc)
    elif args.format == "tsv":
        print("region\tbits")
        for k, v in regions:
            print(f"{k}\t{fixed(v)}")
    else:
        if triple:
            print(triple)
        width = max(len(k) for k, _ in regions)
        for k, v in regions:
            print(f"{k:<{width}}  {fixed(v):>10}")
    return EXIT_OK


def cmd_condmat(args) -> int:
    rho = _load(args)
    part = _partition(args, rho)
    if args.kind == "cond":
        amp = entcalc.conditional_amplitude(rho, part)
    else:
        amp = entcalc.mutual_amplitude(rho, part)
    spectrum = np.sort(amp.eigenvalues())
    unclassical = [bool(w > 1 + entcalc.UNCLASSICAL_TOL) for w in spectrum]
    joint = qstate.reduce(rho, part.side_a + part.side_b)
    diagonal = np.allclose(joint.mat, np.diag(np.diag(joint.mat)), atol=1e-12)

    if args.format == "json":
        doc = {"partition": str(part), "kind": amp.kind, "method": amp.method}
        if args.show in ("matrix", "both"):
            doc["matrix_re"] = [[_clean(x) for x in row] for row in amp.mat.real]
            doc["matrix_im"] = [[_clean(x) for x in row] for row in amp.mat.imag]
        if args.show in ("spectrum", "both"):
            doc["spectrum"] = [_clean(w) for w in spectrum]
            doc["unclassical"] = unclassical
        doc["classical_reduction"] = diagonal
        emit_json(doc)
        return EXIT_OK

    name = "rho_{%s|%s}" if amp.kind == "conditional" else "rho_{%s:%s}"
    print(f"{name % (group(part.side_a), group(part.side_b))}  method={amp.method}")
    if args.show in ("matrix", "both"):
        print("real part:")
        for row in amp.mat.real:
            print("  " + " ".join(f"{fixed(x):>10}" for x in row))
        print("imaginary part:")
        for row in amp.mat.imag:
            print("  " + " ".join(f"{fixed(x):>10}" for x in row))
    if args.show in ("spectrum", "both"):
        print("spectrum:")
        for w, flag in zip(spectrum, unclassical):
            print(f"  {fixed(w):>10}" + ("  unclassical" if flag else ""))
        print(f"unclassical eigenvalues: {sum(unclassical)}")
    if diagonal:
        note = "p_i|j" if amp.kind == "conditional" else "p_i p_j / p_ij"
        print(f"classical reduction: diagonal state, operator is {note} on its support")
    return EXIT_OK


def cmd_reduce(args) -> int:
    rho = _load(args)
    if not args.keep:
        raise UsageError("--keep LABELS is required")
    out = qstate.reduce(rho, _labels(args.keep))
    if args.out:
        qstate.save_state(out, args.out)
        print(f"wrote reduced state ({group(out.labels)}) to {args.out}")
    else:
        sys.stdout.write(qstate.dumps_state(out))
    return EXIT_OK


def cmd_check(args) -> int:
    rho = _load(args)
    part = _partition(args, rho)
    rep = entcalc.check_bounds(rho, part)
    verdict = "entangled" if rep.entanglement_witnessed else "inconclusive"
    a, b = group(part.side_a), group(part.side_b)
    if args.format == "json":
        emit_json({
            "partition": str(part),
            "entropies": {
                f"S({a})": _clean(rep.s_a), f"S({b})": _clean(rep.s_b),
                f"S({a}{b})": _clean(rep.s_ab), f"S({a}|{b})": _clean(rep.s_a_given_b),
                f"S({b}|{a})": _clean(rep.s_b_given_a), f"S({a}:{b})": _clean(rep.s_mutual),
            },
            "classical_mutual_bound_violated": rep.classical_mutual_bound_violated,
            "araki_lieb_satisfied": rep.araki_lieb_satisfied,
            "araki_lieb_saturated": rep.araki_lieb_saturated,
            "negative_conditional": {f"{a}|{b}": rep.negative_conditional[0],
                                     f"{b}|{a}": rep.negative_conditional[1]},
            "entanglement_witnessed": rep.entanglement_witnessed,
            "verdict": verdict,
        })
    else:
        yes = {True: "yes", False: "no"}
        print(f"S({a}:{b}) = {fixed(rep.s_mutual)}  min(S({a}),S({b})) = {fixed(min(rep.s_a, rep.s_b))}")
        print(f"classical bound S({a}:{b}) <= min violated: {yes[rep.classical_mutual_bound_violated]}")
        print(f"Araki-Lieb S({a}:{b}) <= 2 min satisfied: {yes[rep.araki_lieb_satisfied]}"
              + (" (saturated)" if rep.araki_lieb_saturated else ""))
        print(f"negative S({a}|{b}): {yes[rep.negative_conditional[0]]} ({fixed(rep.s_a_given_b)})")
        print(f"negative S({b}|{a}): {yes[rep.negative_conditional[1]]} ({fixed(rep.s_b_given_a)})")
        print(f"verdict: {verdict}")
    if args.expect and args.expect != verdict:
        print(f"expected {args.expect}, got {verdict}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def trotter_trend(distances: list[float], slack: float = 0.1, floor: float = 1e-12) -> bool:
    """Non-increasing across doublings from the third entry on, within ``slack``."""
    tail = distances[2:]
    return all(d2 <= (1 + slack) * d1 or d2 <= floor for d1, d2 in zip(tail, tail[1:]))


def cmd_trotter(args) -> int:
    n_max = args.n_max
    if n_max < 1 or n_max & (n_max - 1) or n_max > entcalc.TROTTER_MAX_N:
        raise UsageError(f"--n-max must be a power of two in [1, {entcalc.TROTTER_MAX_N}], got {n_max}")
    rho = _load(args)
    part = _partition(args, rho)
    ns = [2**k for k in range(n_max.bit_length())]
    steps = entcalc.trotter_sequence(rho, part, ns)
    dist = [s.distance for s in steps]
    monotone = trotter_trend(dist)
    if args.format == "json":
        emit_json({"partition": str(part),
                   "steps": [{"n": s.n, "distance": _clean(s.distance)} for s in steps],
                   "non_increasing": monotone})
        return EXIT_OK
    sep = "\t" if args.format == "tsv" else "  "
    print(f"n{sep}frobenius_distance")
    for s in steps:
        print(f"{s.n}{sep}{s.distance:.6e}")
    if max(dist) <= 1e-12:
        print("trend: exact at every n (joint and marginal commute)")
    else:
        print("trend: " + ("non-increasing" if monotone else "NOT monotone")
              + f"; distance {dist[0]:.3e} at n=1 -> {dist[-1]:.3e} at n={ns[-1]}")
    return EXIT_OK


# --- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inp", metavar="PATH", help="input state file")
    common.add_argument("--out", metavar="PATH", help="output state file")
    common.add_argument("--format", choices=("text", "json", "tsv"), default="text")
    common.add_argument("--partition", metavar="SPEC", help='e.g. "A|B" or "A,B|C"')
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="qitool", description="Conditional and mutual quantum entropies.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("make", parents=[common], help="write a named state")
    s.add_argument("name", help=", ".join(STATE_NAMES))
    s.set_defaults(func=cmd_make)

    s = sub.add_parser("entropy", parents=[common], help="entropies of a bipartition")
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("diagram", parents=[common], help="binary or ternary entropy diagram")
    s.add_argument("--labels", help="2 or 3 comma-separated labels (default: all)")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("condmat", parents=[common], help="conditional or mutual amplitude operator")
    s.add_argument("--kind", choices=("cond", "mutual"), default="cond")
    s.add_argument("--show", choices=("matrix", "spectrum", "both"), default="both")
    s.set_defaults(func=cmd_condmat)

    s = sub.add_parser("reduce", parents=[common], help="partial trace down to the given labels")
    s.add_argument("--keep", help="comma-separated labels to keep")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("check", parents=[common], help="entropy bounds and entanglement witness")
    s.add_argument("--expect", choices=("entangled", "inconclusive"))
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("trotter", parents=[common], help="finite-n convergence of the conditional operator")
    s.add_argument("--n-max", type=int, default=256)
    s.set_defaults(func=cmd_trotter)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, PartitionError, UnknownLabel, EmptyKeep) as exc:
        print(f"qitool: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QcondError, OSError) as exc:
        print(f"qitool: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
