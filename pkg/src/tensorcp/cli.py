"""Command-line interface.

Machine-readable reports go to stdout as ``key: value`` lines and are
byte-stable for identical inputs and seeds; human summaries (including wall
times) go to stderr.  Exit codes: 0 success, 1 a NonMember verdict or suite
failure was found, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import classes, suites, tcp
from .core import majorization, tensor_from_matrix, tv_contract
from .formats import (
    ParseError,
    format_number,
    parse_matrix,
    parse_tensor,
    parse_vector,
    write_tensor,
)

_CLASSIFY_KINDS = (
    "semipositive",
    "strict-semipositive",
    "semimonotone",
    "strict-semimonotone",
    "p0",
    "p",
    "r0",
    "r",
    "q-falsify",
)

_MATRIX_KINDS = {"semimonotone", "strict-semimonotone"}


def _fmt_vec(v) -> str:
    return " ".join(format_number(x) for x in np.asarray(v, dtype=float))


def _fmt_matrix(m) -> str:
    return " / ".join(_fmt_vec(row) for row in np.asarray(m, dtype=float))


def _emit(key: str, value) -> None:
    print(f"{key}: {value}")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    return Path(path).read_text()


def _vector_from_args(args, attr: str, file_attr: str, what: str):
    inline = getattr(args, attr, None)
    file_ = getattr(args, file_attr, None)
    if (inline is None) == (file_ is None):
        raise ParseError(1, f"provide exactly one of --{what} or --{what}-file")
    if inline is not None:
        try:
            return np.array([float(tok) for tok in inline.split()])
        except ValueError:
            raise ParseError(1, f"--{what} {inline!r} is not a list of numbers") from None
    return parse_vector(_read(file_))


def _threads_from(args) -> int:
    if args.threads is not None:
        value = args.threads
    else:
        env = os.environ.get("TENSORCP_THREADS", "")
        try:
            value = int(env) if env else 1
        except ValueError:
            raise ParseError(1, f"TENSORCP_THREADS {env!r} is not an integer") from None
    if value < 1:
        raise ParseError(1, f"--threads must be >= 1, got {value}")
    return value


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_eval(args) -> int:
    M = parse_tensor(_read(args.tensor))
    u = _vector_from_args(args, "vec", "vec_file", "vec")
    result = tv_contract(M, u)
    _emit("result", _fmt_vec(result))
    _note(f"contracted order-{M.order} tensor at {_fmt_vec(u)}")
    return 0


def _cmd_majorize(args) -> int:
    M = parse_tensor(_read(args.tensor))
    _emit("matrix", _fmt_matrix(majorization(M)))
    return 0


def _cmd_product(args) -> int:
    from .core import shao_product

    left_text = _read(args.lhs)
    right_text = _read(args.rhs)
    left = parse_matrix(left_text) if args.left == "matrix" else parse_tensor(left_text)
    try:
        right = parse_tensor(right_text)
    except ParseError:
        right = parse_matrix(right_text)
    result = shao_product(left, right)
    sys.stdout.write(write_tensor(result))
    _note(f"product has order {result.order}, dimension {result.dim}, {result.nnz} entries")
    return 0


def _check_config_from(args) -> classes.CheckConfig:
    return classes.CheckConfig(
        grid_resolution=args.grid_resolution,
        refine_iters=args.refine_iters,
        tol_pos=args.tol_pos,
        tol_neg=args.tol_neg,
        seed=args.seed,
    )


def _solver_config_from(args) -> tcp.SolverConfig:
    return tcp.SolverConfig(
        newton_starts=args.newton_starts,
        newton_iters=args.newton_iters,
        damping=args.damping,
        tol_residual=args.tol_residual,
        dedupe_radius=args.dedupe_radius,
        seed=args.seed,
    )


def _emit_verdict(verdict: classes.ClassVerdict) -> None:
    _emit("status", verdict.status.value)
    if verdict.witness is not None:
        _emit("witness", _fmt_vec(verdict.witness))
    if verdict.certificate is not None:
        _emit("certificate", _fmt_vec(verdict.certificate))
    if verdict.resolution is not None:
        _emit("resolution", format_number(verdict.resolution))


def _cmd_classify(args) -> int:
    kind = args.kind
    _threads_from(args)  # validated; classification itself is vectorized
    if kind in _MATRIX_KINDS:
        if not args.matrix:
            raise ParseError(1, f"--kind {kind} requires --matrix")
        A = parse_matrix(_read(args.matrix))
        verdict = (
            classes.check_semimonotone(A)
            if kind == "semimonotone"
            else classes.check_strictly_semimonotone(A)
        )
        _emit("kind", kind)
        _emit_verdict(verdict)
        _emit("seed", args.seed)
        _note(f"{kind}: {verdict.status.value}")
        return 0 if verdict.is_member else 1

    if not args.tensor:
        raise ParseError(1, f"--kind {kind} requires --tensor")
    M = parse_tensor(_read(args.tensor))
    _emit("kind", kind)
    if kind == "q-falsify":
        report = classes.q_falsifier(M, args.q_samples, _solver_config_from(args))
        _emit("attempted", report.attempted)
        _emit("failures", report.failures)
        for q in report.unsolved:
            _emit("unsolved-q", _fmt_vec(q))
        _emit("seed", args.seed)
        _note(f"q-falsify: {report.failures} unsolved right-hand sides out of {report.attempted}")
        return 1 if report.failures else 0
    if kind in ("r0", "r"):
        cfg = _solver_config_from(args)
        verdict = classes.check_r0(M, cfg) if kind == "r0" else classes.check_r(M, cfg)
        _emit_verdict(verdict)
        _emit("seed", args.seed)
        _note(f"{kind}: {verdict.status.value}")
        return 0 if verdict.is_member else 1
    cfg = _check_config_from(args)
    checker = {
        "semipositive": classes.check_semipositive,
        "strict-semipositive": classes.check_strictly_semipositive,
        "p0": classes.check_p0,
        "p": classes.check_p,
    }[kind]
    verdict = checker(M, cfg)
    _emit_verdict(verdict)
    _emit("grid_resolution", cfg.grid_resolution)
    _emit("refine_iters", cfg.refine_iters)
    _emit("tol_pos", format_number(cfg.tol_pos))
    _emit("tol_neg", format_number(cfg.tol_neg))
    _emit("seed", cfg.seed)
    _note(f"{kind}: {verdict.status.value}")
    return 0 if verdict.is_member else 1


def _emit_solutions(solutions) -> None:
    _emit("solutions", len(solutions))
    for k, s in enumerate(solutions):
        _emit(f"u{k}", _fmt_vec(s.u))
        _emit(f"w{k}", _fmt_vec(s.w))
        _emit(f"support{k}", " ".join(str(i) for i in s.support) or "-")
        _emit(f"residual{k}", format_number(s.residual))


def _cmd_solve(args) -> int:
    threads = _threads_from(args)
    q = _vector_from_args(args, "q", "q_file", "q")
    if args.lcp:
        A = parse_matrix(_read(args.matrix)) if args.matrix else majorization(parse_tensor(_read(args.tensor)))
        report = tcp.solve_lcp_report(A, q, _solver_config_from(args))
        _emit("problem", "lcp")
        _emit_solutions(report.solutions)
        if report.skipped_supports:
            _emit(
                "singular_supports",
                "; ".join(" ".join(map(str, s)) for s in report.skipped_supports),
            )
        _note(f"lcp: {len(report.solutions)} solutions")
        return 0
    if not args.tensor:
        raise ParseError(1, "--tcp requires --tensor")
    M = parse_tensor(_read(args.tensor))
    report = tcp.solve_tcp_report(M, q, _solver_config_from(args), threads=threads)
    _emit("problem", "tcp")
    _emit_solutions(report.solutions)
    if report.singular_supports:
        _emit(
            "singular_supports",
            "; ".join(" ".join(map(str, s)) for s in report.singular_supports),
        )
    _emit("completeness", "found set; per-support roots beyond Newton reach may be missing")
    _note(f"tcp: {len(report.solutions)} solutions, {report.failed_starts} failed starts")
    return 0


def _cmd_verify(args) -> int:
    threads = _threads_from(args)
    names = list(suites.SUITE_NAMES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in suites.SUITE_NAMES:
        raise ParseError(1, f"unknown suite {args.suite!r}; known: {', '.join(suites.SUITE_NAMES)}, all")
    gen_cfg = suites.GenConfig(density=args.density, seed=args.seed)
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    report_lines: list[str] = []
    failures = 0
    for i, name in enumerate(names):
        report = suites.run_suite(name, args.trials, gen_cfg, threads=threads)
        reports.append(report)
        block = [
            f"suite: {report.suite}",
            f"trials: {report.trials}",
            f"failures: {report.failures}",
            f"seed: {report.seed}",
            f"density: {format_number(args.density)}",
        ]
        if out_dir:
            for k, dump in enumerate(report.counterexamples):
                dump_path = out_dir / f"{report.suite}_counterexample{k}.txt"
                dump_path.write_text(dump)
                block.append(f"counterexample{k}: {dump_path}")
        if i:
            report_lines.append("")
        report_lines.extend(block)
        failures += report.failures
        _note(
            f"suite {report.suite}: {report.trials} trials, {report.failures} failures"
            f" ({report.wall_time:.2f} s)"
        )
    text = "\n".join(report_lines) + "\n"
    sys.stdout.write(text)
    if out_dir:
        from . import plots

        (out_dir / "report.txt").write_text(text)
        for report in reports:
            plots.render_suite_figure(report, out_dir / f"{report.suite}.png")
        if len(reports) > 1:
            plots.render_summary_figure(reports, out_dir / "suites.png")
        _note(f"report and figures written to {out_dir}")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Parser


def _add_threads(p) -> None:
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: TENSORCP_THREADS or 1)",
    )


def _add_check_flags(p) -> None:
    p.add_argument("--grid-resolution", type=int, default=32)
    p.add_argument("--refine-iters", type=int, default=200)
    p.add_argument("--tol-pos", type=float, default=1e-9)
    p.add_argument("--tol-neg", type=float, default=1e-9)


def _add_solver_flags(p) -> None:
    p.add_argument("--newton-starts", type=int, default=25)
    p.add_argument("--newton-iters", type=int, default=100)
    p.add_argument("--damping", type=float, default=1.0)
    p.add_argument("--tol-residual", type=float, default=1e-10)
    p.add_argument("--dedupe-radius", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorcp",
        description="Tensor algebra, class checkers, and complementarity solvers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="contract a tensor with a vector")
    p.add_argument("--tensor", required=True)
    p.add_argument("--vec", help='inline vector, e.g. "1 1"')
    p.add_argument("--vec-file")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("classify", help="run a class membership check")
    p.add_argument("--kind", required=True, choices=_CLASSIFY_KINDS)
    p.add_argument("--tensor")
    p.add_argument("--matrix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q-samples", type=int, default=100)
    _add_check_flags(p)
    _add_solver_flags(p)
    _add_threads(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("majorize", help="print the majorization matrix")
    p.add_argument("--tensor", required=True)
    p.set_defaults(fn=_cmd_majorize)

    p = sub.add_parser("product", help="general tensor product")
    p.add_argument("--left", required=True, choices=("matrix", "tensor"))
    p.add_argument("--lhs", required=True, help="left operand file")
    p.add_argument("--rhs", required=True, help="right operand file (tensor or matrix)")
    p.set_defaults(fn=_cmd_product)

    p = sub.add_parser("solve", help="solve a complementarity problem")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--tcp", action="store_true")
    kind.add_argument("--lcp", action="store_true")
    p.add_argument("--tensor")
    p.add_argument("--matrix")
    p.add_argument("--q", help='inline right-hand side, e.g. "-1 2"')
    p.add_argument("--q-file")
    p.add_argument("--seed", type=int, default=0)
    _add_solver_flags(p)
    _add_threads(p)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("verify", help="run a randomized theorem suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, default=0.4)
    p.add_argument("--out", help="directory for the report, dumps, and figures")
    _add_threads(p)
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, FileNotFoundError, ValueError) as exc:
        _note(f"error: {exc}")
        return 2


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
