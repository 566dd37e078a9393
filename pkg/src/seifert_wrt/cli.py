"""Command-line front end: ``seifert-wrt <subcommand> SEIFERT [options]``.

Exit status is 0 on success, 1 on bad input and 2 when a verification
subcommand (``compare``, ``casson``) misses its tolerance.  Floats are
printed with 14 significant digits and -0.0 is folded to 0.0, so repeated
runs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import analysis, asympt, exact, moduli
from .seifert import SeifertData, SeifertInputError, parse

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = 15
    depth: int = 0
    r_range: tuple[int, int] = (3, 10)
    output: str = "pretty"
    eval_mode: str = "exact_phase"

    def __post_init__(self) -> None:
        if self.precision_digits < 15:
            raise ValueError("--precision must be at least 15")
        if self.depth < 0:
            raise ValueError("--N must be nonnegative")
        lo, hi = self.r_range
        if lo < 2 or hi < lo:
            raise ValueError(f"bad level range {lo}..{hi}; need 2 <= A <= B")

    @property
    def levels(self) -> range:
        return range(self.r_range[0], self.r_range[1] + 1)

    @property
    def dps(self) -> int | None:
        return self.precision_digits if self.precision_digits > 15 else None


# ---- formatting ----------------------------------------------------------------------

def fmt_float(v: float) -> float:
    v = float(f"{float(v):.14g}")
    return 0.0 if v == 0 else v


def fmt_complex(z: complex) -> tuple[float, float]:
    """Real and imaginary parts, each zeroed when below 1e-14 of |z|."""
    floor = 1e-14 * abs(z)
    re = 0.0 if abs(z.real) < floor else z.real
    im = 0.0 if abs(z.imag) < floor else z.imag
    return fmt_float(re), fmt_float(im)


def _clean(obj):
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, complex):
        re, im = fmt_complex(obj)
        return {"re": re, "im": im}
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _emit_json(payload) -> str:
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"


def _emit_csv(header: list[str] | None, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit_pretty(header: list[str], rows) -> str:
    cells = [[str(fmt_float(v)) if isinstance(v, float) else str(v) for v in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _table(cfg: RunConfig, header, rows, payload, csv_header=True) -> str:
    if cfg.output == "json":
        return _emit_json(payload)
    if cfg.output == "csv":
        return _emit_csv(header if csv_header else None, rows)
    return _emit_pretty(header, rows)


def _workers() -> int | None:
    raw = os.environ.get("SEIFERT_WRT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SEIFERT_WRT_THREADS must be an integer, got {raw!r}") from None
    return None if n <= 0 else n


# ---- subcommands ------------------------------------------------------------------------

def cmd_invariant(x: SeifertData, cfg: RunConfig) -> tuple[int, str]:
    levels = list(cfg.levels)
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        values = list(pool.map(lambda r: exact.tau(x, r, dps=cfg.dps), levels))
    parts = [fmt_complex(v) for v in values]
    rows = [(r, re, im) for r, (re, im) in zip(levels, parts)]
    payload = {"seifert": x.to_text(), "values": [{"r": r, "re": re, "im": im} for r, re, im in rows]}
    return EXIT_OK, _table(cfg, ["r", "re", "im"], rows, payload, csv_header=False)


def cmd_expand(x: SeifertData, cfg: RunConfig) -> tuple[int, str]:
    exp = asympt.full_expansion(x, cfg.depth)
    payload = asympt.expansion_to_json(exp, cfg.eval_mode)
    branches = exp.branches if cfg.eval_mode == "exact_phase" else exp.tau_branches("series")
    rows = [(str(q), asympt._exp_text(e), c.real, c.imag)
            for q, br in sorted(branches.items()) for e, c in sorted(br.items(), reverse=True)]
    return EXIT_OK, _table(cfg, ["q", "exponent", "re", "im"], rows, payload)


def cmd_compare(x: SeifertData, cfg: RunConfig) -> tuple[int, str]:
    rep = analysis.compare_convergence(x, cfg.depth, cfg.levels, cfg.eval_mode, dps=cfg.dps)
    code = EXIT_OK if rep.passed else EXIT_VERIFY
    if cfg.output == "json":
        return code, _emit_json(rep.to_json())
    if cfg.output == "csv":
        return code, analysis.convergence_csv(rep)
    rows = [(r, e) for r, e in zip(rep.r_values, rep.residuals)]
    text = _emit_pretty(["r", "abs_residual"], rows)
    text += f"fitted_order {fmt_float(rep.fitted_order)}  expected_order {fmt_float(rep.expected_order)}  "
    text += "PASS\n" if rep.passed else "FAIL\n"
    return code, text


def cmd_cs(x: SeifertData, cfg: RunConfig) -> tuple[int, str]:
    spec = moduli.cs_spectrum(x)
    rows = [(d["label"], d["q"], d["cs"], d["rep_exists"]) for d in spec]
    return EXIT_OK, _table(cfg, ["label", "q", "cs", "rep_exists"], rows, spec)


def cmd_moduli(x: SeifertData, cfg: RunConfig) -> tuple[int, str]:
    sets = moduli.index_sets(x)
    records = []
    for kind, labs in (("I1", sets.I1), ("I2a", sets.I2a), ("I2b", sets.I2b)):
        for lab in labs:
            rec = {"set": kind, "label": str(lab), "q": str(lab.q)}
            if lab.kind == "I1":
                rec["z_st"] = str(moduli.z_st(x, lab.index, lab.n))
                rec["rep_exists"] = True
            else:
                rec["z_st"] = ""
                rec["rep_exists"] = moduli.rep_exists(x, lab)
            records.append(rec)
    rows = [(d["set"], d["label"], d["q"], d["z_st"], d["rep_exists"]) for d in records]
    payload = {"counts": {"I1": len(sets.I1), "I2a": len(sets.I2a), "I2b": len(sets.I2b)}, "labels": records}
    return EXIT_OK, _table(cfg, ["set", "label", "q", "z_st", "rep_exists"], rows, payload)


def cmd_casson(x: SeifertData, cfg: RunConfig) -> tuple[int, str]:
    if x.euler == 0:
        val = analysis.casson_lescop(x)
        payload = {"lambda_clw": str(val), "note": "E = 0; Lescop extension, no check"}
        return EXIT_OK, _table(cfg, ["lambda_clw"], [(str(val),)], payload)
    chk = analysis.casson_walker(x)
    code = EXIT_OK if chk.passed else EXIT_VERIFY
    rows = [(str(chk.lambda_cw), chk.series_ratio.imag, chk.target.imag, chk.rel_error, chk.passed)]
    return code, _table(cfg, ["lambda_cw", "im_ratio", "im_target", "rel_error", "passed"], rows, chk.to_json())


def cmd_vanish_scan(x: SeifertData, cfg: RunConfig) -> tuple[int, str]:
    recs = asympt.vanish_scan(x)
    rows = [(d["label"], d["q"], d["max_abs_z1"]) for d in recs]
    return EXIT_OK, _table(cfg, ["label", "q", "max_abs_z1"], rows, recs)


COMMANDS = {
    "invariant": (cmd_invariant, "tau_r over the level range"),
    "expand": (cmd_expand, "asymptotic expansion export"),
    "compare": (cmd_compare, "convergence of the expansion against exact values"),
    "cs": (cmd_cs, "Chern-Simons spectrum of the flat families"),
    "moduli": (cmd_moduli, "index sets with realizability"),
    "casson": (cmd_casson, "Casson-Walker invariant and the trivial-branch check"),
    "vanish-scan": (cmd_vanish_scan, "Z1 magnitudes at non-realizable I2b labels"),
}


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="seifert-wrt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("seifert", help='Seifert data, e.g. "o;0|-1;(2,1),(3,1),(7,1)"')
        sp.add_argument("--r", type=_parse_range, default=(3, 10), metavar="A..B")
        sp.add_argument("--N", type=int, default=0, dest="depth")
        sp.add_argument("--precision", type=int, default=15)
        sp.add_argument("--output", choices=("json", "csv", "pretty"), default=None)
        sp.add_argument("--eval-mode", choices=("exact_phase", "series"), default="exact_phase")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    output = args.output or ("csv" if args.command == "invariant" else "pretty")
    try:
        cfg = RunConfig(args.precision, args.depth, args.r, output, args.eval_mode)
        x = parse(args.seifert)
        code, text = COMMANDS[args.command][0](x, cfg)
    except (SeifertInputError, asympt.UnsupportedParity, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
