"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or range error,
3 no certificate found.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
from pathlib import Path

from . import comparator, lfunc, twist
from .characters import DirichletCharacter
from .modforms import (
    ALIASES,
    CorpusError,
    NewformRecord,
    RangeError,
    dumps_record,
    loads_record,
    synthesize_tate_twist,
)
from .store import (
    OUTPUT_FORMATS,
    WEIGHT_CONVENTIONS,
    ConfigError,
    RunConfig,
    atomic_write,
    builtin_records,
    load_config,
    user_records,
)

SCHEMA = 1

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NO_CERT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers ---------------------------------------------------------------


class Session:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._records: dict[int, list[NewformRecord]] = {}

    def records(self, bound: int | None = None) -> list[NewformRecord]:
        bound = max(bound or 0, self.cfg.coefficient_bound)
        if bound not in self._records:
            self._records[bound] = user_records(self.cfg.user_dir) + builtin_records(bound)
        return self._records[bound]

    def form(self, fid: str, need: int | None = None) -> NewformRecord:
        """Resolve ``id[:tate=r][:chi=q/e1,e2,...]``; modifiers apply left to right."""
        base, *mods = fid.split(":")
        base = ALIASES.get(base, base)
        for rec in self.records(need):
            if rec.id == base:
                break
        else:
            raise KeyError(f"unknown form id {base!r}")
        if need and rec.bound < need:
            raise RangeError(f"{base} stores {rec.bound} coefficients, {need} needed")
        for mod in mods:
            key, _, value = mod.partition("=")
            if key == "tate":
                rec = synthesize_tate_twist(rec, int(value))
            elif key == "chi":
                q, _, exps = value.partition("/")
                exps = tuple(int(e) for e in exps.split(",")) if exps else ()
                rec = twist.twist_record(rec, DirichletCharacter(int(q), exps))
            else:
                raise UsageError(f"unknown modifier {mod!r} (use tate=r or chi=q/e1,e2)")
        return rec


def _envelope(command: str, body: dict) -> dict:
    return {"schema": SCHEMA, "command": command, **body}


def _emit(args, cfg: RunConfig, command: str, body: dict, text: str, csv: str | None = None) -> None:
    fmt = cfg.output_format
    if fmt == "json":
        out = json.dumps(_envelope(command, body), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        if csv is None:
            raise UsageError(f"'{command}' has no CSV form; use text or json")
        out = csv
    else:
        out = text if text.endswith("\n") else text + "\n"
    if getattr(args, "output", None):
        atomic_write(args.output, out)
    else:
        sys.stdout.write(out)


def _density_text(rep: comparator.DensityReport) -> str:
    lines = [f"density of {rep.set_label}:"]
    for X, c, n, r in rep.checkpoints:
        lines.append(f"  X={X:>9}  |S|={c:>7}  pi={n:>7}  ratio={float(r):.6f}")
    lines.append(
        f"  upper density estimate (max of last {rep.tail_window}): "
        f"{float(rep.upper_density_estimate):.6f}"
    )
    return "\n".join(lines)


# -- commands --------------------------------------------------------------


def cmd_corpus_list(args, cfg: RunConfig, sess: Session) -> int:
    recs = sess.records()
    rows = [
        {"id": r.id, "weight": r.weight, "level": r.level, "cm": r.cm, "synthetic": r.synthetic, "bound": r.bound}
        for r in recs
    ]
    text = "\n".join(
        f"{r['id']:<14} k={r['weight']:<3} N={r['level']:<4} cm={str(r['cm']).lower():<5} "
        f"bound={r['bound']}"
        for r in rows
    )
    _emit(args, cfg, "corpus list", {"records": rows}, text)
    return EXIT_OK


def cmd_corpus_export(args, cfg: RunConfig, sess: Session) -> int:
    ids = args.ids or [r.id for r in sess.records()]
    if args.dir:
        for fid in ids:
            rec = sess.form(fid)
            atomic_write(Path(args.dir) / f"{rec.id}.qexp", dumps_record(rec))
        sys.stdout.write(f"exported {len(ids)} record(s) to {args.dir}\n")
    else:
        if len(ids) != 1:
            raise UsageError("exporting to stdout takes exactly one id (or pass --dir)")
        sys.stdout.write(dumps_record(sess.form(ids[0])))
    return EXIT_OK


def cmd_corpus_import(args, cfg: RunConfig, sess: Session) -> int:
    if not cfg.user_dir:
        raise UsageError("corpus import needs --user-dir (or user_dir in the config file)")
    dest = Path(cfg.user_dir)
    for name in args.files:
        rec = loads_record(Path(name).read_text())
        dest.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(name, dest / f"{rec.id}.qexp")
        sys.stdout.write(f"imported {rec.id} (k={rec.weight}, N={rec.level}, bound={rec.bound})\n")
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig, sess: Session) -> int:
    X = args.X or cfg.coefficient_bound
    f1, f2 = sess.form(args.f1, X), sess.form(args.f2, X)
    S = comparator.coincidence_set(f1, f2, X, cfg.weight_convention)
    rep = comparator.upper_density(
        S, X, cfg.checkpoints, cfg.tail_window, set_label=f"coincidence({f1.id}, {f2.id})"
    )
    finding = comparator.infer_parity_and_r(f1, f2, S)
    body = {
        "f1": f1.id,
        "f2": f2.id,
        "X": X,
        "weight_convention": cfg.weight_convention,
        "coincidence_count": len(S),
        "density": rep.to_dict(),
        "parity": finding.to_dict(),
    }
    text = (
        f"{f1.id} (k={f1.weight}) vs {f2.id} (k={f2.weight}), primes <= {X}\n"
        f"coincidences: {len(S)}\n{_density_text(rep)}\n"
        f"parity: {finding.status}, r = {finding.r}, {len(finding.witness_primes)} witness prime(s)"
    )
    _emit(args, cfg, "compare", body, text, rep.to_csv())
    return EXIT_OK


def cmd_detect_twist(args, cfg: RunConfig, sess: Session) -> int:
    X = args.X or cfg.coefficient_bound
    f1, f2 = sess.form(args.f1, X), sess.form(args.f2, X)
    search = twist.detect_twist_report(f1, f2, cfg.modulus_bound, X, cfg.weight_convention)
    result = search.result
    body = {"f1": f1.id, "f2": f2.id, "X": X, "parity": search.parity.to_dict()}
    if isinstance(result, twist.TwistCertificate):
        ok, failures = twist.verify_certificate(result, f1, f2, X)
        body["certificate"] = result.to_dict()
        body["verification"] = {"passed": ok, "failing_primes": failures}
        chi = result.chi
        text = (
            f"certificate: a_p({f1.id}) = chi(p) p^{result.r} a_p({f2.id}) for good p <= {X}\n"
            f"  chi: modulus {chi.modulus}, exponents {list(chi.generator_exponents)}, "
            f"conductor {chi.conductor}, order {chi.order}\n"
            f"  sturm target {result.sturm_target}, exceptional primes {result.exceptional_primes}\n"
            f"  re-verification: {'pass' if ok else 'FAIL ' + str(failures[:10])}"
        )
        _emit(args, cfg, "detect-twist", body, text)
        return EXIT_OK if ok else EXIT_DATA
    if isinstance(result, twist.WeakMatch):
        body["weak_match"] = result.to_dict()
        text = f"weak match only: {result.reason}"
    else:
        body["certificate"] = None
        text = f"no certificate: parity {search.parity.status}, {len(search.coincidences)} coincidence(s)"
    _emit(args, cfg, "detect-twist", body, text)
    return EXIT_NO_CERT


def cmd_density(args, cfg: RunConfig, sess: Session) -> int:
    X = args.X or cfg.density_X
    f = sess.form(args.form, X)
    V = comparator.vanishing_set(f, X)
    rep = comparator.upper_density(V, X, cfg.checkpoints, cfg.tail_window, set_label=f"vanishing({f.id})")
    body = {"form": f.id, "X": X, "cm": f.cm, "vanishing_count": len(V), "density": rep.to_dict()}
    text = f"{f.id} (cm={str(f.cm).lower()}): {len(V)} vanishing prime(s) <= {X}\n{_density_text(rep)}"
    _emit(args, cfg, "density", body, text, rep.to_csv())
    return EXIT_OK


def _c(z: complex) -> list[float]:
    return [z.real, z.imag]


def cmd_lfunc(args, cfg: RunConfig, sess: Session) -> int:
    sub = args.lfunc_cmd
    if sub == "gamma":
        res = lfunc.gamma_ratio_check(complex(args.s), args.m)
        body = {"s": _c(complex(args.s)), "m": args.m, "lhs": _c(res.lhs), "rhs": _c(res.rhs),
                "relative_error": res.relative_error}
        text = (
            f"Gamma(s)/Gamma(s-{args.m}) = {_fmt(res.lhs)}\n"
            f"prod (s-j)          = {_fmt(res.rhs)}\nrelative error {res.relative_error:.3e}"
        )
    elif sub == "lattice":
        zs = lfunc.euler_zero_lattice(complex(args.alpha), args.p, range(args.n_min, args.n_max + 1))
        body = {"alpha": _c(complex(args.alpha)), "p": args.p,
                "zeros": [{"s": _c(z.s), "n": z.n, "residual": z.residual} for z in zs]}
        text = "\n".join(f"n={z.n:>3}  s={_fmt(z.s)}  residual={z.residual:.2e}" for z in zs)
    elif sub == "shift":
        f2 = sess.form(args.form)
        cutoff = args.cutoff or f2.bound
        err = lfunc.l_shift_identity_check(f2, args.r, args.M, complex(args.s), cutoff)
        body = {"form": f2.id, "r": args.r, "M": args.M, "s": _c(complex(args.s)), "cutoff": cutoff,
                "relative_error": err}
        text = f"L_M({f2.id} (x) w^{args.r}, s) vs L_M({f2.id}, s-{args.r}): relative error {err:.3e}"
    elif sub == "obstruction":
        if (args.k1 - args.k2) % 2:
            raise UsageError("k1 - k2 must be even")
        r = (args.k1 - args.k2) // 2
        data = []
        if args.form:
            f2 = sess.form(args.form)
        else:
            f2 = next((rec for rec in sess.records() if rec.weight == args.k2 and not rec.synthetic), None)
        if f2 is not None and r >= 0:
            if f2.weight != args.k2:
                raise UsageError(f"{f2.id} has weight {f2.weight}, not k2 = {args.k2}")
            data = lfunc.bad_euler_data(synthesize_tate_twist(f2, r), f2, args.ell)
        rep = lfunc.tate_twist_obstruction(args.k1, args.k2, r, data)
        body = {"report": rep.to_dict()}
        shown = rep.exhibited_zeros()[:6]
        text = "\n".join(
            [
                f"k1={rep.k1} k2={rep.k2} r={rep.r}",
                f"LHS zeros {rep.lhs_zeros}, poles {rep.lhs_poles}, disjoint={rep.disjoint}",
                f"no cancellation: k1 - 2r = {rep.no_cancellation_margin} = k2 > 0",
                f"RHS Euler terms: {len(rep.rhs_terms)}",
                *(f"  zero s={_fmt(z['s'])} residual={z['residual']:.1e} |LHS|={z['abs_lhs']:.3e}" for z in shown),
                f"r_admissible={str(rep.r_admissible).lower()}",
                rep.reason,
            ]
        )
    elif sub == "feq":
        f = sess.form(args.form)
        sign = f.root_number
        if sign is not None and args.negate_sign:
            sign = -sign
        res = lfunc.functional_equation_residual(f, complex(args.s), args.terms, sign)
        body = {"form": f.id, "s": _c(complex(args.s)), "sign": sign, "terms": args.terms,
                "residual": res, "functional_equation": lfunc.functional_equation_data(f).to_dict()}
        text = f"|Lambda(s) - ({sign}) Lambda(k-s)| / |Lambda(s)| = {res:.3e} for {f.id} at s={args.s}"
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(sub)
    _emit(args, cfg, f"lfunc {sub}", body, text)
    return EXIT_OK


def _fmt(z: complex) -> str:
    return f"{z.real:.10g}{z.imag:+.10g}i"


# -- argument parsing ------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration (flags override the config file)")
    g.add_argument("--config", help="flat 'key = value' config file")
    g.add_argument("--bound", type=int, dest="coefficient_bound",
                   help="coefficient bound for generated records (default 10000)")
    g.add_argument("--density-x", type=int, dest="density_X", help="default X for density (default 100000)")
    g.add_argument("--modulus-bound", type=int, help="largest character modulus searched (default 16)")
    g.add_argument("--weight-convention", choices=WEIGHT_CONVENTIONS,
                   help="normalize by p^((k-1)/2) (motivic, default) or p^(k/2) (statement)")
    g.add_argument("--tail-window", type=int, help="checkpoints used by the density estimate (default 3)")
    g.add_argument("--checkpoints", type=int, help="number of geometric checkpoints (default 8)")
    g.add_argument("--format", choices=OUTPUT_FORMATS, dest="output_format", help="output format (default text)")
    g.add_argument("--user-dir", help="directory of extra *.qexp records")
    g.add_argument("--output", "-o", help="write the report here (atomically) instead of stdout")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="twistlab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    corpus_p = sub.add_parser("corpus", help="list, export or import q-expansion records")
    corpus_sub = corpus_p.add_subparsers(dest="corpus_cmd", required=True, parser_class=_Parser)
    corpus_sub.add_parser("list", parents=[common])
    exp = corpus_sub.add_parser("export", parents=[common])
    exp.add_argument("ids", nargs="*")
    exp.add_argument("--dir")
    imp = corpus_sub.add_parser("import", parents=[common])
    imp.add_argument("files", nargs="+")

    cmp_p = sub.add_parser("compare", parents=[common], help="normalized-trace coincidences of two forms")
    cmp_p.add_argument("f1")
    cmp_p.add_argument("f2")
    cmp_p.add_argument("--X", type=int)

    dt = sub.add_parser("detect-twist", parents=[common], help="search and verify a twist certificate")
    dt.add_argument("f1")
    dt.add_argument("f2")
    dt.add_argument("--X", type=int)

    den = sub.add_parser("density", parents=[common], help="density of primes where a_p vanishes")
    den.add_argument("form")
    den.add_argument("--X", type=int)

    lf = sub.add_parser("lfunc", help="L-function checks")
    lsub = lf.add_subparsers(dest="lfunc_cmd", required=True, parser_class=_Parser)
    g = lsub.add_parser("gamma", parents=[common])
    g.add_argument("--s", type=complex, required=True)
    g.add_argument("--m", type=int, required=True)
    lat = lsub.add_parser("lattice", parents=[common])
    lat.add_argument("--alpha", type=complex, required=True)
    lat.add_argument("--p", type=int, required=True)
    lat.add_argument("--n-min", type=int, default=-2)
    lat.add_argument("--n-max", type=int, default=2)
    sh = lsub.add_parser("shift", parents=[common])
    sh.add_argument("--form", required=True)
    sh.add_argument("--r", type=int, required=True)
    sh.add_argument("--s", type=complex, required=True)
    sh.add_argument("--M", type=int, default=1)
    sh.add_argument("--cutoff", type=int)
    ob = lsub.add_parser("obstruction", parents=[common])
    ob.add_argument("--k1", type=int, required=True)
    ob.add_argument("--k2", type=int, required=True)
    ob.add_argument("--form", help="weight-k2 form supplying the Euler data (default: first corpus form of weight k2)")
    ob.add_argument("--ell", type=int, help="auxiliary prime (default: smallest prime not dividing N1 N2)")
    fe = lsub.add_parser("feq", parents=[common])
    fe.add_argument("--form", required=True)
    fe.add_argument("--s", type=complex, required=True)
    fe.add_argument("--terms", type=int)
    fe.add_argument("--negate-sign", action="store_true")
    return parser


_CONFIG_KEYS = ("coefficient_bound", "density_X", "modulus_bound", "weight_convention",
                "tail_window", "checkpoints", "output_format", "user_dir")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING)
    try:
        cfg = load_config(getattr(args, "config", None),
                          **{k: getattr(args, k, None) for k in _CONFIG_KEYS})
    except (ConfigError, OSError) as exc:
        print(f"twistlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sess = Session(cfg)
    handler = {
        "compare": cmd_compare,
        "detect-twist": cmd_detect_twist,
        "density": cmd_density,
        "lfunc": cmd_lfunc,
    }.get(args.command)
    if args.command == "corpus":
        handler = {"list": cmd_corpus_list, "export": cmd_corpus_export, "import": cmd_corpus_import}[
            args.corpus_cmd
        ]
    try:
        return handler(args, cfg, sess)
    except UsageError as exc:
        print(f"twistlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, RangeError, CorpusError, lfunc.ConvergenceError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"twistlab: {msg}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
