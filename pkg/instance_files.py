"""
Versioned text format for reduction instances, plus DIMACS CNF.

Every instance file starts with a fixed banner line, a format version and a
kind tag, followed by the kind's header keys in a fixed order and its matrix
block. GF(2) matrices are row-major 0/1 strings; lattice entries are decimal
integers separated by single spaces. parse_instance(emit_instance(x)) == x.
"""

import hashlib
import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Union

from csp import Cnf3Formula, Csp2Instance
from errors import InstanceFormatError
from gf2codes import BitMatrix, BitVector
from latticecore import IntMatrix, IntVector, LvsInstance, SnvpInstance, SvpInstance
from mdpchain import MdpInstance
from mldchain import MldInstance, SncInstance

logger = logging.getLogger(__name__)

BANNER = "# reduction-toolkit instance"
FORMAT_VERSION = 1
KINDS = ("csp2", "mld", "snc", "mdp", "lvs", "snvp", "svp")

Instance = Union[Csp2Instance, MldInstance, SncInstance, MdpInstance,
                 LvsInstance, SnvpInstance, SvpInstance]

_KIND_OF = {
    Csp2Instance: "csp2",
    MldInstance: "mld",
    SncInstance: "snc",
    MdpInstance: "mdp",
    LvsInstance: "lvs",
    SnvpInstance: "snvp",
    SvpInstance: "svp",
}


def kind_of(instance) -> str:
    try:
        return _KIND_OF[type(instance)]
    except KeyError:
        raise TypeError(f"not an instance type: {type(instance).__name__}") from None


def _fraction_text(value) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _bit_rows(a: BitMatrix) -> List[str]:
    return ["".join(str(int(b)) for b in a.data[i]) for i in range(a.rows)]


def _int_rows(a: IntMatrix) -> List[str]:
    return [" ".join(str(v) for v in row) for row in a.to_lists()]


# ---------------------------------------------------------------------------
# Emit
# ---------------------------------------------------------------------------

def emit_instance(instance: Instance) -> str:
    """Serialize an instance; the output always ends with a newline."""
    kind = kind_of(instance)
    lines = [BANNER, f"format: {FORMAT_VERSION}", f"kind: {kind}"]
    if kind == "csp2":
        lines += [f"vertices: {instance.num_vertices}",
                  f"alphabet: {instance.alphabet_size}",
                  f"edges: {instance.num_edges}",
                  "constraints:"]
        for (u, v), allowed in zip(instance.edges, instance.constraints):
            pairs = " ".join(f"{a},{b}" for a, b in sorted(allowed))
            lines.append(f"{u} {v}:" + (f" {pairs}" if pairs else ""))
    elif kind in ("mld", "snc", "mdp"):
        a = instance.a
        lines += [f"rows: {a.rows}", f"cols: {a.cols}", f"k: {instance.k}", "matrix:"]
        lines += _bit_rows(a)
        if kind != "mdp":
            lines.append(f"target: {instance.y}")
    elif kind in ("lvs", "snvp"):
        a = instance.a if kind == "lvs" else instance.b
        lines += [f"rows: {a.rows}", f"cols: {a.cols}"]
        if kind == "lvs":
            lines.append(f"k: {instance.k}")
        else:
            lines += [f"t: {instance.t}", f"p: {_fraction_text(instance.p)}"]
        lines.append("matrix:")
        lines += _int_rows(a)
        lines.append(f"target: {instance.y}")
    else:
        b = instance.b
        no_bound = "none" if instance.no_bound_pp is None else _fraction_text(instance.no_bound_pp)
        lines += [f"rows: {b.rows}", f"cols: {b.cols}", f"p: {instance.p}",
                  f"budget: {_fraction_text(instance.k_pp)}",
                  f"structured: {'true' if instance.structured else 'false'}",
                  f"no_bound: {no_bound}", "matrix:"]
        lines += _int_rows(b)
    return "\n".join(lines) + "\n"


def digest(instance: Instance) -> str:
    """sha256 of the canonical text."""
    return hashlib.sha256(emit_instance(instance).encode("utf-8")).hexdigest()


def write_instance(path, instance: Instance) -> str:
    text = emit_instance(instance)
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    logger.debug("Wrote %s instance to %s", kind_of(instance), path)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Parse
# ---------------------------------------------------------------------------

class _Reader:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise InstanceFormatError("unexpected end of file", self.pos + 1)
        line = self.lines[self.pos].rstrip("\r")
        self.pos += 1
        return line

    def value(self, key: str) -> str:
        line = self.next()
        prefix = f"{key}:"
        if not line.startswith(prefix):
            raise InstanceFormatError(f"expected '{key}:'", self.pos)
        return line[len(prefix):].strip()

    def integer(self, key: str, minimum: int = 0) -> int:
        raw = self.value(key)
        try:
            value = int(raw)
        except ValueError:
            raise InstanceFormatError(f"'{key}' must be an integer, got '{raw}'", self.pos) from None
        if value < minimum:
            raise InstanceFormatError(f"'{key}' must be at least {minimum}", self.pos)
        return value

    def fraction(self, key: str) -> Fraction:
        raw = self.value(key)
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise InstanceFormatError(f"'{key}' must be a rational a/b, got '{raw}'", self.pos) from None

    def finish(self):
        if self.pos != len(self.lines):
            raise InstanceFormatError("trailing content", self.pos + 1)

    def bit_rows(self, rows: int, cols: int) -> BitMatrix:
        grid = []
        for _ in range(rows):
            line = self.next()
            if len(line) != cols or set(line) - {"0", "1"}:
                raise InstanceFormatError(f"expected a 0/1 row of length {cols}", self.pos)
            grid.append([int(c) for c in line])
        return BitMatrix.from_rows(grid, cols)

    def int_row(self, line: str, cols: int) -> List[int]:
        parts = line.split(" ") if line else []
        if len(parts) != cols:
            raise InstanceFormatError(f"expected {cols} integers", self.pos)
        try:
            return [int(v) for v in parts]
        except ValueError:
            raise InstanceFormatError("malformed integer entry", self.pos) from None

    def int_rows(self, rows: int, cols: int) -> IntMatrix:
        if rows == 0:
            return IntMatrix.zeros(0, cols)
        return IntMatrix([self.int_row(self.next(), cols) for _ in range(rows)])


def _parse_csp2(reader: _Reader) -> Csp2Instance:
    n = reader.integer("vertices", 1)
    sigma = reader.integer("alphabet", 1)
    m = reader.integer("edges")
    if reader.next() != "constraints:":
        raise InstanceFormatError("expected 'constraints:'", reader.pos)
    edges, constraints = [], []
    for _ in range(m):
        line = reader.next()
        head, sep, tail = line.partition(":")
        try:
            u, v = (int(x) for x in head.split())
            pairs = [tuple(int(x) for x in p.split(",")) for p in tail.split()]
        except ValueError:
            raise InstanceFormatError("malformed constraint line", reader.pos) from None
        if not sep or any(len(p) != 2 for p in pairs):
            raise InstanceFormatError("malformed constraint line", reader.pos)
        edges.append((u, v))
        constraints.append(frozenset(pairs))
    return Csp2Instance(n, sigma, tuple(edges), tuple(constraints))


def _parse_gf2(reader: _Reader, kind: str) -> Instance:
    rows = reader.integer("rows")
    cols = reader.integer("cols")
    k = reader.integer("k")
    if reader.next() != "matrix:":
        raise InstanceFormatError("expected 'matrix:'", reader.pos)
    a = reader.bit_rows(rows, cols)
    if kind == "mdp":
        return MdpInstance(a, k)
    target = reader.value("target")
    if len(target) != rows or set(target) - {"0", "1"}:
        raise InstanceFormatError(f"target must be a 0/1 string of length {rows}", reader.pos)
    y = BitVector.from_string(target) if rows else BitVector.zeros(0)
    return (MldInstance if kind == "mld" else SncInstance)(a, y, k)


def _parse_lattice(reader: _Reader, kind: str) -> Instance:
    rows = reader.integer("rows")
    cols = reader.integer("cols")
    if kind == "lvs":
        k = reader.integer("k")
    elif kind == "snvp":
        t = reader.integer("t")
        p = reader.fraction("p")
    else:
        p = reader.integer("p", 1)
        budget = reader.fraction("budget")
        structured = reader.value("structured")
        if structured not in ("true", "false"):
            raise InstanceFormatError("'structured' must be true or false", reader.pos)
        raw_bound = reader.value("no_bound")
        try:
            no_bound = None if raw_bound == "none" else Fraction(raw_bound)
        except (ValueError, ZeroDivisionError):
            raise InstanceFormatError("malformed 'no_bound'", reader.pos) from None
    if reader.next() != "matrix:":
        raise InstanceFormatError("expected 'matrix:'", reader.pos)
    a = reader.int_rows(rows, cols)
    if kind == "svp":
        return SvpInstance(a, budget, p, structured == "true", no_bound)
    y = IntVector(tuple(reader.int_row(reader.value("target"), rows)))
    if kind == "lvs":
        return LvsInstance(a, y, k)
    return SnvpInstance(a, y, t, p)


def parse_instance(text: str) -> Instance:
    """Parse the text format.

    Raises:
        InstanceFormatError: On any syntax error, unknown kind or version, or
            content the instance types reject.
    """
    reader = _Reader(text)
    if reader.next() != BANNER:
        raise InstanceFormatError("missing instance banner", 1)
    version = reader.integer("format", 1)
    if version != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format version {version}", reader.pos)
    kind = reader.value("kind")
    if kind not in KINDS:
        raise InstanceFormatError(f"unknown kind '{kind}'", reader.pos)
    try:
        if kind == "csp2":
            instance = _parse_csp2(reader)
        elif kind in ("mld", "snc", "mdp"):
            instance = _parse_gf2(reader, kind)
        else:
            instance = _parse_lattice(reader, kind)
    except InstanceFormatError:
        raise
    except ValueError as e:
        raise InstanceFormatError(str(e), reader.pos) from e
    reader.finish()
    return instance


def read_instance(path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def peek_header(text: str) -> dict:
    """Header keys up to the first block line, for inspection without a full parse."""
    header = {}
    for line in text.split("\n")[1:]:
        if not line or line.endswith(":") and " " not in line:
            break
        key, _, value = line.partition(":")
        header[key.strip()] = value.strip()
    return header


# ---------------------------------------------------------------------------
# DIMACS CNF
# ---------------------------------------------------------------------------

def parse_dimacs(text: str) -> Cnf3Formula:
    """DIMACS CNF with clauses of one to three literals; clauses may span lines."""
    num_vars = num_clauses = None
    clauses, current = [], []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InstanceFormatError("expected 'p cnf <vars> <clauses>'", number)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise InstanceFormatError("malformed problem line", number) from None
            continue
        if num_vars is None:
            raise InstanceFormatError("clause before the problem line", number)
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise InstanceFormatError(f"bad literal '{token}'", number) from None
            if lit == 0:
                if not current:
                    raise InstanceFormatError("empty clause", number)
                if len(current) > 3:
                    raise InstanceFormatError("clause with more than three literals", number)
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > num_vars:
                    raise InstanceFormatError(f"literal {lit} exceeds {num_vars} variables", number)
                current.append(lit)
    if num_vars is None:
        raise InstanceFormatError("missing problem line")
    if current:
        raise InstanceFormatError("last clause is not terminated by 0")
    if len(clauses) != num_clauses:
        raise InstanceFormatError(f"declared {num_clauses} clauses, found {len(clauses)}")
    return Cnf3Formula(num_vars, tuple(clauses))


def emit_dimacs(formula: Cnf3Formula, comments: Optional[Sequence[str]] = None) -> str:
    lines = [f"c {c}" for c in comments or ()]
    lines.append(f"p cnf {formula.num_vars} {formula.num_clauses}")
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in formula.clauses]
    return "\n".join(lines) + "\n"


def read_dimacs(path) -> Cnf3Formula:
    return parse_dimacs(Path(path).read_text(encoding="utf-8"))
