"""
Command-line front end.

Exit status is 0 on success, 1 on a domain error (bad spec file, failed
verification, size limits) and 2 on a usage error.
"""
import argparse
import itertools
import json
import sys

import numpy as np

from . import oracle
from .automaton import OPERATOR, STATE, evaluate_periodic, to_dot
from .complexfmt import format_complex
from .errors import AutoMPSError
from .grid2d import (SignalingAgent, brute_force_weight, compile_grid, enumerate_grid,
                     grid_weight)
from .mp_compile import unroll, unroll_periodic
from .mp_state import expectation, inner, random_mps
from .specfile import parse_spec
from .variational import sweep

__all__ = ["main", "run", "build_parser"]

VERIFY_ATOL = 1e-8
EXACT_ATOL = 1e-12


class CommandError(AutoMPSError):
    pass


def _num(z):
    z = complex(z)
    if z.imag == 0:
        return float(f"{z.real:.17g}")
    return {"re": float(f"{z.real:.17g}"), "im": float(f"{z.imag:.17g}")}


def _text(z):
    return format_complex(z, digits=12)


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(text, source=path)


def _automaton(path, kind=None):
    obj = _load(path)
    if isinstance(obj, SignalingAgent):
        raise CommandError(f"{path} defines an agent; use the 'grid' command")
    if kind is not None and obj.kind != kind:
        raise CommandError(f"{path} defines a {obj.kind} automaton, expected {kind}")
    return obj


def _agent(path):
    obj = _load(path)
    if not isinstance(obj, SignalingAgent):
        raise CommandError(f"{path} defines an automaton; 'grid' needs an agent")
    return obj


def _compile(a, n, periodic):
    return unroll_periodic(a, n) if periodic else unroll(a, n)


def _basis(k, d, n):
    """Row-major basis label: the base-d digits of ``k``, one per site."""
    digits = np.base_repr(k, base=d).zfill(n)
    return digits if d <= 10 else str(k)


def cmd_compile(args, out):
    a = _automaton(args.spec)
    m = _compile(a, args.sites, args.periodic)
    results = {"kind": a.kind, "bond_extents": m.bond_extents()}
    lines = ["bond extents: " + " ".join(map(str, m.bond_extents()))]
    if args.dense:
        if a.kind == STATE:
            vec = oracle.dense_state(m)
            basis = [_basis(k, a.symbols.d, args.sites) for k in range(len(vec))]
            results["amplitudes"] = [{"basis": b, "value": _num(v)} for b, v in zip(basis, vec)]
            lines += [f"{b} {_text(v)}" for b, v in zip(basis, vec)]
        else:
            mat = oracle.dense_operator(m)
            rows, cols = np.nonzero(mat)
            entries = [(int(r), int(c), mat[r, c]) for r, c in zip(rows, cols)]
            results["dimension"] = mat.shape[0]
            results["entries"] = [{"row": r, "col": c, "value": _num(v)} for r, c, v in entries]
            lines.append(f"dimension {mat.shape[0]}, {len(entries)} nonzero entries")
            lines += [f"{r} {c} {_text(v)}" for r, c, v in entries]
    return results, lines, 0


def _state_for(args, op):
    if args.state:
        s = _compile(_automaton(args.state, STATE), args.sites, args.periodic)
        if s.d != op.d:
            raise CommandError(f"state dimension {s.d} differs from operator dimension {op.d}")
        return s
    boundary = "periodic" if args.periodic else "open"
    return random_mps(args.sites, op.d, args.bond, seed=args.seed, boundary=boundary)


def cmd_expect(args, out):
    a = _automaton(args.spec, OPERATOR)
    op = _compile(a, args.sites, args.periodic)
    s = _state_for(args, op)
    norm = inner(s, s)
    if abs(norm) == 0:
        raise CommandError("the state has zero norm")
    value = expectation(s, op, s) / norm
    results = {"expectation": _num(value), "norm": _num(norm)}
    lines = [f"expectation {_text(value)}", f"norm {_text(norm)}"]
    status = 0
    if args.verify:
        vec = oracle.dense_state(s)
        mat = oracle.dense_operator(op)
        exact = (vec.conj() @ mat @ vec) / (vec.conj() @ vec)
        diff = abs(exact - value)
        ok = diff <= VERIFY_ATOL * max(1.0, abs(exact))
        results.update(dense=_num(exact), difference=diff, verified=bool(ok))
        lines += [f"dense {_text(exact)}", f"difference {diff:.3e}", "verified" if ok else "MISMATCH"]
        status = 0 if ok else 1
    return results, lines, status


def cmd_dmrg(args, out):
    if args.periodic:
        raise CommandError("the sweep supports open chains only")
    a = _automaton(args.spec, OPERATOR)
    h = unroll(a, args.sites)
    s0 = random_mps(args.sites, h.d, args.bond, seed=args.seed)
    _, report = sweep(h, s0, max_sweeps=args.sweeps, tol=args.tol, verify=args.verify)
    results = {"energies": [_num(e) for e in report.energies], "energy": _num(report.energy),
               "converged": report.converged, "sweeps": len(report.energies)}
    lines = [f"sweep {k + 1} energy {e:.15g}" for k, e in enumerate(report.energies)]
    lines.append(f"energy {report.energy:.15g}")
    lines.append("converged" if report.converged else "not converged")
    status = 0
    if args.verify:
        exact, _ = oracle.exact_ground(oracle.dense_operator(h))
        diff = abs(report.energy - exact)
        ok = diff <= VERIFY_ATOL
        results.update(exact=_num(exact), difference=diff, verified=bool(ok))
        lines += [f"exact {exact:.15g}", f"difference {diff:.3e}", "verified" if ok else "MISMATCH"]
        status = 0 if ok else 1
    return results, lines, status


def _verify_agent(args):
    agent = _agent(args.spec)
    if args.rows is None or args.cols is None:
        raise CommandError("verifying an agent needs --rows and --cols")
    g = compile_grid(agent, args.rows, args.cols)
    worst = 0.0
    count = 0
    for config in itertools.product(agent.alphabet, repeat=args.rows * args.cols):
        grid = [config[r * args.cols:(r + 1) * args.cols] for r in range(args.rows)]
        worst = max(worst, abs(grid_weight(g, grid) - brute_force_weight(agent, grid)))
        count += 1
    return {"configurations": count, "max_error": worst}, worst


def cmd_verify(args, out):
    obj = _load(args.spec)
    if isinstance(obj, SignalingAgent):
        results, worst = _verify_agent(args)
    else:
        if args.sites is None:
            raise CommandError("verifying an automaton needs --sites")
        m = _compile(obj, args.sites, args.periodic)
        if args.periodic:
            values = {w: evaluate_periodic(obj, w)
                      for w in itertools.product(obj.alphabet, repeat=args.sites)}
            ref = sum(v * oracle.kron_chain([obj.symbols[s] for s in w])
                      for w, v in values.items())
        else:
            ref = oracle.automaton_dense(obj, args.sites)
        fast = oracle.dense_state(m) if obj.kind == STATE else oracle.dense_operator(m)
        worst = float(np.max(np.abs(fast - ref)))
        results = {"sites": args.sites, "max_error": worst}
    ok = worst <= EXACT_ATOL
    results["verified"] = bool(ok)
    lines = [f"{k} {v}" for k, v in results.items()]
    return results, lines, 0 if ok else 1


def cmd_grid(args, out):
    agent = _agent(args.spec)
    g = compile_grid(agent, args.rows, args.cols)
    results = {"rows": args.rows, "cols": args.cols, "signals": agent.n_signals}
    lines = [f"grid {args.rows}x{args.cols}, {agent.n_signals} signals"]
    if args.enumerate:
        accepted = list(enumerate_grid(g))
        results["accepted"] = [{"config": ["".join(r) for r in c], "weight": _num(w)}
                               for c, w in accepted]
        lines.append(f"accepted {len(accepted)}")
        for config, w in accepted:
            lines.append(f"weight {_text(w)}")
            lines += ["  " + " ".join(row) for row in config]
    return results, lines, 0


def cmd_dot(args, out):
    a = _automaton(args.spec)
    text = to_dot(a, name=args.name)
    return {"dot": text}, [text.rstrip("\n")], 0


COMMANDS = {
    "compile": cmd_compile, "expect": cmd_expect, "dmrg": cmd_dmrg,
    "verify": cmd_verify, "grid": cmd_grid, "dot": cmd_dot,
}


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {value}")
    return value


def build_parser():
    p = argparse.ArgumentParser(prog="automps", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("spec", help="spec file")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    sp = add("compile", "unroll an automaton into a chain")
    sp.add_argument("--sites", type=_positive, required=True)
    sp.add_argument("--periodic", action="store_true")
    sp.add_argument("--dense", action="store_true", help="print the dense vector or matrix")

    sp = add("expect", "expectation value of an operator automaton")
    sp.add_argument("--sites", type=_positive, required=True)
    sp.add_argument("--state", help="state automaton spec (default: random chain)")
    sp.add_argument("--bond", type=_positive, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--periodic", action="store_true")
    sp.add_argument("--verify", action="store_true", help="compare with the dense oracle")

    sp = add("dmrg", "variational ground state of an operator automaton")
    sp.add_argument("--sites", type=_positive, required=True)
    sp.add_argument("--bond", type=_positive, default=8)
    sp.add_argument("--sweeps", type=_positive, default=20)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--periodic", action="store_true")
    sp.add_argument("--verify", action="store_true", help="compare with exact diagonalization")

    sp = add("verify", "check compiled objects against brute-force oracles")
    sp.add_argument("--sites", type=_positive)
    sp.add_argument("--rows", type=_positive)
    sp.add_argument("--cols", type=_positive)
    sp.add_argument("--periodic", action="store_true")

    sp = add("grid", "compile an agent on a grid")
    sp.add_argument("--rows", type=_positive, required=True)
    sp.add_argument("--cols", type=_positive, required=True)
    sp.add_argument("--enumerate", action="store_true", help="list accepted configurations")

    sp = add("dot", "GraphViz DOT export")
    sp.add_argument("--name", default="wfa")
    return p


def run(argv=None, out=None, err=None):
    """Run one command; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        results, lines, status = COMMANDS[args.command](args, out)
    except AutoMPSError as exc:
        print(f"error: {exc}", file=err)
        return 1
    if args.json:
        inputs = {k: v for k, v in vars(args).items() if k not in ("json", "command")}
        json.dump({"command": args.command, "inputs": inputs, "results": results}, out)
        out.write("\n")
    else:
        for line in lines:
            print(line, file=out)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
