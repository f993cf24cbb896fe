"""Problem files and trace CSVs.

Problem files are JSON objects with exactly the fields ``n``, ``domains``
and ``constraints``.  Any number of leading ``#`` lines may precede the JSON
body; they carry provenance (generator config, seed) and are ignored by the
parser.
"""

import csv
import io
import json
from pathlib import Path

from .exceptions import ContractViolation
from .model import CDCOPInstance, QuadraticConstraint

PROBLEM_FIELDS = ("n", "domains", "constraints")
CONSTRAINT_FIELDS = ("i", "j", "coeffs")
TRACE_COLUMNS = (
    "iteration",
    "elapsed_ms",
    "gbest_utility",
    "employed_requests",
    "onlooker_requests",
    "total_messages",
)


def header_lines(header):
    if not header:
        return ""
    return "".join(f"# {k}: {json.dumps(v, sort_keys=True)}\n" for k, v in header.items())


def split_header(text):
    """Split leading ``#`` comment lines from the body."""
    header = {}
    lines = text.splitlines(keepends=True)
    k = 0
    while k < len(lines) and lines[k].lstrip().startswith("#"):
        content = lines[k].lstrip()[1:].strip()
        if ":" in content:
            key, _, value = content.partition(":")
            try:
                header[key.strip()] = json.loads(value)
            except json.JSONDecodeError:
                header[key.strip()] = value.strip()
        k += 1
    return header, "".join(lines[k:])


def problem_to_dict(inst):
    constraints = []
    for c in inst.constraints:
        if not isinstance(c, QuadraticConstraint):
            raise ContractViolation(f"only quadratic constraints can be serialised, got {c!r}")
        constraints.append({"i": c.i, "j": c.j, "coeffs": list(c.coeffs.as_tuple())})
    return {
        "n": inst.n,
        "domains": [[d.lb, d.ub] for d in inst.domains],
        "constraints": constraints,
    }


def problem_from_dict(data):
    if not isinstance(data, dict):
        raise ContractViolation("problem must be a JSON object")
    unknown = set(data) - set(PROBLEM_FIELDS)
    if unknown:
        raise ContractViolation(f"unknown problem fields: {sorted(unknown)}")
    missing = set(PROBLEM_FIELDS) - set(data)
    if missing:
        raise ContractViolation(f"missing problem fields: {sorted(missing)}")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ContractViolation(f"n must be an integer, got {n!r}")
    domains = []
    for d in data["domains"]:
        if not isinstance(d, (list, tuple)) or len(d) != 2:
            raise ContractViolation(f"domain must be a [lb, ub] pair, got {d!r}")
        domains.append(tuple(float(v) for v in d))
    constraints = []
    for entry in data["constraints"]:
        if not isinstance(entry, dict):
            raise ContractViolation(f"constraint must be an object, got {entry!r}")
        unknown = set(entry) - set(CONSTRAINT_FIELDS)
        if unknown:
            raise ContractViolation(f"unknown constraint fields: {sorted(unknown)}")
        if set(entry) != set(CONSTRAINT_FIELDS):
            raise ContractViolation(f"constraint needs fields {CONSTRAINT_FIELDS}, got {sorted(entry)}")
        coeffs = entry["coeffs"]
        if len(coeffs) != 6:
            raise ContractViolation(f"coeffs must have 6 entries, got {len(coeffs)}")
        constraints.append(QuadraticConstraint(entry["i"], entry["j"], [float(v) for v in coeffs]))
    return CDCOPInstance(n, domains, constraints)


def dumps_problem(inst, header=None):
    # json.dumps writes floats with repr(), which round-trips exactly
    return header_lines(header) + json.dumps(problem_to_dict(inst), indent=1) + "\n"


def loads_problem(text):
    _, body = split_header(text)
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ContractViolation(f"problem body is not valid JSON: {exc}") from None
    return problem_from_dict(data)


def save_problem(inst, path, header=None):
    path = Path(path)
    path.write_text(dumps_problem(inst, header))
    return path


def load_problem(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ContractViolation(f"cannot read problem file {path}: {exc}") from None
    return loads_problem(text)


def dumps_trace(records, header=None):
    buf = io.StringIO()
    buf.write(header_lines(header))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.iteration,
                f"{r.elapsed_ms:.3f}",
                repr(float(r.gbest_utility)),
                r.employed_requests,
                r.onlooker_requests,
                r.total_messages,
            ]
        )
    return buf.getvalue()


def write_trace(records, path, header=None):
    path = Path(path)
    path.write_text(dumps_trace(records, header))
    return path


def read_trace(path):
    """Read a trace CSV back as a list of row dicts with typed values."""
    header, body = split_header(Path(path).read_text())
    rows = []
    for row in csv.DictReader(io.StringIO(body)):
        rows.append(
            {
                "iteration": int(row["iteration"]),
                "elapsed_ms": float(row["elapsed_ms"]),
                "gbest_utility": float(row["gbest_utility"]),
                "employed_requests": int(row["employed_requests"]),
                "onlooker_requests": int(row["onlooker_requests"]),
                "total_messages": int(row["total_messages"]),
            }
        )
    return header, rows
