"""CPLEX-style LP file text (Minimize / Subject To / Bounds / End).

The writer lists every variable in the objective, zero coefficients
included, so column order survives a round trip through the parser.
Numbers are written with ``repr`` which round-trips doubles exactly.
"""
from __future__ import annotations

import csv
import io
import re

import numpy as np

from .program import EQ, GE, LE, LinearProgram, LPError, ProgramBuilder

_LINE_WIDTH = 250
_TOKEN = re.compile(
    r"\s*(?:(<=|=<|>=|=>|<|>|=)|([+-])|(:)|"
    r"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf(?:inity)?(?!\w))|([A-Za-z_][\w.\[\]]*))",
    re.IGNORECASE,
)


def _num(v: float) -> str:
    if v == np.inf:
        return "inf"
    if v == -np.inf:
        return "-inf"
    return repr(float(v))


def _terms(cols, vals, names) -> str:
    parts = []
    for j, v in zip(cols, vals):
        sgn = "-" if (v < 0 or (v == 0 and np.signbit(v))) else "+"
        parts.append(f"{sgn} {_num(abs(v))} {names[j]}")
    return _wrap(" ".join(parts) if parts else "0")


def _wrap(text: str) -> str:
    if len(text) <= _LINE_WIDTH:
        return text
    out, line = [], ""
    for tok in text.split(" "):
        if len(line) + len(tok) + 1 > _LINE_WIDTH:
            out.append(line)
            line = tok
        else:
            line = f"{line} {tok}" if line else tok
    out.append(line)
    return "\n   ".join(out)


def export_lp_text(lp: LinearProgram) -> str:
    if lp.names is None:
        raise LPError("export needs named variables")
    names = lp.names
    rel_out = {LE: "<=", EQ: "=", GE: ">="}
    lines = ["\\ medoid_lp export", "Minimize" if lp.sense == "min" else "Maximize"]
    lines.append(" obj: " + _terms(range(lp.n_vars), lp.c, names))
    lines.append("Subject To")
    A = lp.A.tocsr()
    row_names = lp.row_names or tuple(f"c{r + 1}" for r in range(lp.n_rows))
    for r in range(lp.n_rows):
        s, e = A.indptr[r], A.indptr[r + 1]
        expr = _terms(A.indices[s:e], A.data[s:e], names)
        lines.append(f" {row_names[r]}: {expr} {rel_out[lp.relations[r]]} {_num(lp.b[r])}")
    lines.append("Bounds")
    for j in range(lp.n_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo == 0.0 and hi == np.inf:
            continue
        if lo == -np.inf and hi == np.inf:
            lines.append(f" {names[j]} free")
        elif lo == hi:
            lines.append(f" {names[j]} = {_num(lo)}")
        else:
            lines.append(f" {_num(lo)} <= {names[j]} <= {_num(hi)}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _tokenize(text: str):
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LPError(f"cannot parse LP text near {text[pos:pos + 20]!r}")
        pos = m.end()
        rel, sign, colon, num, ident = m.groups()
        if rel:
            toks.append(("rel", {"=<": "<=", "=>": ">=", "<": "<=", ">": ">="}.get(rel, rel)))
        elif sign:
            toks.append(("sign", sign))
        elif colon:
            toks.append(("colon", ":"))
        elif num:
            toks.append(("num", float(num.lower().replace("infinity", "inf"))))
        else:
            toks.append(("id", ident))
    return toks


def _linear(toks, i, stop):
    """Parse ``[+-] [coef] name ...`` from ``toks[i]`` until a token of kind ``stop``."""
    terms = []
    sign, coef, pending = 1.0, None, False
    while i < len(toks) and toks[i][0] not in stop:
        kind, val = toks[i]
        if kind == "sign":
            sign = -sign if val == "-" else sign
            pending = True
        elif kind == "num":
            coef = val
            pending = True
        elif kind == "id":
            terms.append((val, sign * (1.0 if coef is None else coef)))
            sign, coef, pending = 1.0, None, False
        else:
            raise LPError(f"unexpected token {val!r}")
        i += 1
    if pending:
        raise LPError("dangling sign or coefficient without a variable")
    return terms, i


def _sections(text: str) -> dict:
    heads = {
        "minimize": "obj", "minimise": "obj", "min": "obj",
        "maximize": "obj", "maximise": "obj", "max": "obj",
        "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
        "bounds": "bounds", "bound": "bounds", "end": "end",
    }
    out = {"obj": [], "st": [], "bounds": []}
    current = None
    sense = "min"
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in heads:
            current = heads[key]
            if current == "obj":
                sense = "max" if key.startswith("max") else "min"
            if current == "end":
                break
            continue
        if current is None:
            raise LPError(f"content before first section: {line!r}")
        out[current].append(line)
    out["sense"] = sense
    return out


def parse_lp_text(text: str) -> LinearProgram:
    """Parse LP text written by :func:`export_lp_text` (or hand-written alike)."""
    sec = _sections(text)
    order: list = []
    index: dict = {}

    def var(name):
        if name not in index:
            index[name] = len(order)
            order.append(name)
        return index[name]

    obj_toks = _tokenize(" ".join(sec["obj"]))
    if len(obj_toks) >= 2 and obj_toks[1][0] == "colon":
        obj_toks = obj_toks[2:]
    obj_terms, _ = _linear(obj_toks, 0, ())
    for name, _ in obj_terms:
        var(name)

    rows = []
    toks = _tokenize(" ".join(sec["st"]))
    i, r = 0, 0
    while i < len(toks):
        name = f"c{r + 1}"
        if i + 1 < len(toks) and toks[i][0] == "id" and toks[i + 1][0] == "colon":
            name = toks[i][1]
            i += 2
        terms, i = _linear(toks, i, ("rel",))
        if i >= len(toks):
            raise LPError(f"constraint {name} has no relation")
        rel = toks[i][1]
        i += 1
        sgn = 1.0
        while toks[i][0] == "sign":
            sgn = -sgn if toks[i][1] == "-" else sgn
            i += 1
        if toks[i][0] != "num":
            raise LPError(f"constraint {name} needs a numeric right-hand side")
        rhs = sgn * toks[i][1]
        i += 1
        for v, _ in terms:
            var(v)
        rows.append((name, terms, rel, rhs))
        r += 1

    bounds = []
    for line in sec["bounds"]:
        bt = _tokenize(line)
        if len(bt) == 2 and bt[0][0] == "id" and bt[1] == ("id", "free"):
            var(bt[0][1])
            bounds.append((bt[0][1], -np.inf, np.inf))
            continue
        bounds.append(_parse_bound(bt, var))

    b = ProgramBuilder(len(order), names=order)
    for name, coef in obj_terms:
        b.c[index[name]] += coef
    for name, lo, hi in bounds:
        j = index[name]
        if lo is not None:
            b.lower[j] = lo
        if hi is not None:
            b.upper[j] = hi
    for name, terms, rel, rhs in rows:
        cols = [index[v] for v, _ in terms]
        vals = [c for _, c in terms]
        b.add_row(cols, vals, {"<=": LE, ">=": GE, "=": EQ}[rel], rhs, name=name)
    return b.build(sense=sec["sense"])


def _signed_num(bt, i):
    sgn = 1.0
    while bt[i][0] == "sign":
        sgn = -sgn if bt[i][1] == "-" else sgn
        i += 1
    if bt[i][0] != "num":
        raise LPError(f"bad bound near {bt[i]!r}")
    return sgn * bt[i][1], i + 1


def _parse_bound(bt, var):
    # forms: lo <= x <= hi | lo <= x | x <= hi | x >= lo | x = v
    if bt[0][0] == "id":
        name = bt[0][1]
        var(name)
        rel = bt[1][1]
        v, _ = _signed_num(bt, 2)
        if rel == "<=":
            return name, None, v
        if rel == ">=":
            return name, v, None
        return name, v, v
    lo, i = _signed_num(bt, 0)
    if bt[i] != ("rel", "<="):
        raise LPError("expected '<=' in bound")
    name = bt[i + 1][1]
    var(name)
    hi = None
    if i + 2 < len(bt):
        hi, _ = _signed_num(bt, i + 3)
    return name, lo, hi


def write_solution_csv(names, x) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "value"])
    for n, v in zip(names, x):
        w.writerow([n, repr(float(v))])
    return buf.getvalue()


def read_solution_csv(text: str, names) -> np.ndarray:
    """Read an externally computed ``name,value`` solution into variable order."""
    index = {n: i for i, n in enumerate(names)}
    x = np.zeros(len(names))
    seen = set()
    for row in csv.DictReader(io.StringIO(text)):
        nm = row["name"].strip()
        if nm not in index:
            raise LPError(f"unknown variable {nm!r} in solution file")
        x[index[nm]] = float(row["value"])
        seen.add(nm)
    missing = set(names) - seen
    if missing:
        raise LPError(f"solution file lacks {len(missing)} variables, e.g. {sorted(missing)[0]!r}")
    return x
