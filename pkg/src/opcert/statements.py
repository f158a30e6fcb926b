"""From operator statements to polynomial certification problems.

Property macros (the four defining equations of a Moore-Penrose inverse,
selected Penrose subsets, identity-element axioms, range-inclusion
factorizations, Hermitian and EP conditions), the involution closure of an
assumption set, quasi-identity workflow steps (star-cancellability), and the
problem file format tying them together.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .certify import Certificate, certify
from .freealg import (AlgebraError, DegLexOrder, FreeAlgebra, Indeterminate,
                      ParseError, Polynomial, normalize_coeff)
from .quiver import LabelledQuiver, ProblemCheck, check_problem, infer_signatures
from .rewrite import CompletionLimits


class WorkflowError(AlgebraError):
    """A quasi-identity step is malformed or its witness was not certified."""


# ---------------------------------------------------------------------------
# Property macros
# ---------------------------------------------------------------------------

def _as_poly(alg: FreeAlgebra, x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, Indeterminate):
        return alg.monomial((x.iid,))
    if isinstance(x, str):
        return alg.gen(x)
    raise TypeError(f"expected polynomial or name, got {type(x).__name__}")


def penrose_equation(x: Polynomial, y: Polynomial, k: int) -> Polynomial:
    """k-th Penrose equation as a polynomial (k in 1..4)."""
    if k == 1:
        return x * y * x - x
    if k == 2:
        return y * x * y - y
    if k == 3:
        return (x * y).adjoint() - x * y
    if k == 4:
        return (y * x).adjoint() - y * x
    raise ValueError("Penrose equations are numbered 1..4")


def mp_equations(x, y, alg: Optional[FreeAlgebra] = None) -> list:
    """All four defining equations of y as the Moore-Penrose inverse of x.

    ``x`` may be a product (polynomial), e.g. a triple abc; equations 3 and 4
    need every letter of x and y to carry an adjoint partner.
    """
    alg = alg or (x.alg if isinstance(x, Polynomial) else y.alg)
    x, y = _as_poly(alg, x), _as_poly(alg, y)
    return [penrose_equation(x, y, k) for k in (1, 2, 3, 4)]


def ij_equations(x, y, subset: Iterable[int],
                 alg: Optional[FreeAlgebra] = None) -> list:
    """The selected subset of Penrose equations (a {i,...,j}-inverse)."""
    ks = sorted(set(subset))
    if not ks:
        raise AlgebraError("the equation subset must be nonempty")
    if not all(k in (1, 2, 3, 4) for k in ks):
        raise AlgebraError("Penrose equation selectors must lie in {1,2,3,4}")
    alg = alg or (x.alg if isinstance(x, Polynomial) else y.alg)
    x, y = _as_poly(alg, x), _as_poly(alg, y)
    return [penrose_equation(x, y, k) for k in ks]


def identity_axioms(unit, neighbors: Sequence[tuple],
                    alg: Optional[FreeAlgebra] = None) -> list:
    """Absorption axioms for an explicit identity element.

    ``neighbors`` holds (operator, side) pairs; side "right" means the unit
    sits right of the operator (x·i = x), "left" the mirror.  The idempotency
    i·i - i is always included.  The unit is an ordinary indeterminate, never
    the empty word.
    """
    alg = alg or (unit.alg if isinstance(unit, Polynomial) else None)
    if alg is None and neighbors:
        first = neighbors[0][0]
        alg = first.alg if isinstance(first, Polynomial) else None
    if alg is None:
        raise TypeError("cannot infer the algebra; pass alg=")
    i = _as_poly(alg, unit)
    out = []
    for x, side in neighbors:
        x = _as_poly(alg, x)
        if side == "right":
            out.append(x * i - x)
        elif side == "left":
            out.append(i * x - x)
        else:
            raise AlgebraError(f"neighbor side must be left or right, got {side!r}")
    out.append(i * i - i)
    return out


def douglas_factorization(alg: FreeAlgebra, lhs: Polynomial, rhs: Polynomial,
                          witness_name: Optional[str] = None):
    """Encode Ran(lhs) within Ran(rhs) as lhs = rhs.w with a fresh witness.

    Returns ``(witness, lhs - rhs*w)``; the witness indeterminate is created
    together with a fresh adjoint partner.
    """
    name = witness_name or fresh_name(alg)
    w, _ = alg.add_pair(name)
    return w, lhs - rhs * alg.monomial((w.iid,))


def hermitian_condition(x: Polynomial) -> Polynomial:
    return x.adjoint() - x


def ep_condition(alg: FreeAlgebra, x: Polynomial) -> list:
    """xR = x*R via two factorization witnesses: x = x*.s and x* = x.t."""
    xs = x.adjoint()
    s, p1 = douglas_factorization(alg, x, xs)
    t, p2 = douglas_factorization(alg, xs, x)
    return [(s, p1), (t, p2)]


def fresh_name(alg: FreeAlgebra, stem: str = "w") -> str:
    k = 1
    while f"{stem}{k}" in alg._by_name or f"{stem}{k}*" in alg._by_name:
        k += 1
    return f"{stem}{k}"


def _monic_key(p: Polynomial, order: DegLexOrder):
    lc = p.lead_coeff(order)
    return frozenset((w, normalize_coeff(Fraction(c) / lc))
                     for w, c in p._terms.items())


def involution_closure(polys: Sequence[Polynomial],
                       order: Optional[DegLexOrder] = None) -> list:
    """Input polynomials plus their adjoints, deduplicated up to sign and
    scalar multiple (symmetry equations are their own negatives)."""
    polys = list(polys)
    if not polys:
        return []
    order = order or polys[0].alg.default_order()
    seen = {_monic_key(p, order) for p in polys if p}
    out = list(polys)
    for p in polys:
        if p.is_zero:
            continue
        q = p.adjoint()
        key = _monic_key(q, order)
        if key not in seen:
            seen.add(key)
            out.append(q)
    return out


# ---------------------------------------------------------------------------
# Quasi-identity workflow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CancellabilityStep:
    """Apply left/right star-cancellability of ``element`` (a monomial).

    right: z.e.e* = 0 implies z.e = 0 -- witness must be conclusion . e*,
    conclusion must factor as z.e.  left is the mirror image.
    """

    side: str  # "left" | "right"
    element: Polynomial
    witness: Polynomial
    conclusion: Polynomial


def _strip_right(p: Polynomial, word, coeff) -> Optional[Polynomial]:
    n = len(word)
    terms = {}
    for w, c in p._terms.items():
        if len(w) < n or w[len(w) - n:] != word:
            return None
        terms[w[:len(w) - n]] = normalize_coeff(Fraction(c) / coeff)
    return p.alg.poly(terms)


def _strip_left(p: Polynomial, word, coeff) -> Optional[Polynomial]:
    n = len(word)
    terms = {}
    for w, c in p._terms.items():
        if len(w) < n or w[:n] != word:
            return None
        terms[w[n:]] = normalize_coeff(Fraction(c) / coeff)
    return p.alg.poly(terms)


def validate_step(step: CancellabilityStep) -> Polynomial:
    """Shape-check a step; returns the z-part or raises WorkflowError."""
    if step.side not in ("left", "right"):
        raise WorkflowError(f"side must be left or right, got {step.side!r}")
    if len(step.element._terms) != 1:
        raise WorkflowError("cancellability element must be a single monomial")
    ((eword, ecoeff),) = step.element._terms.items()
    estar = step.element.adjoint()
    if step.side == "right":
        z = _strip_right(step.conclusion, eword, ecoeff)
        expected = step.conclusion * estar
    else:
        z = _strip_left(step.conclusion, eword, ecoeff)
        expected = estar * step.conclusion
    if z is None:
        raise WorkflowError(
            "conclusion does not factor through the cancellability element "
            f"on the {step.side}")
    if expected != step.witness:
        raise WorkflowError(
            "witness does not match the cancellability shape: expected "
            f"{expected.alg.render(expected)}")
    return z


def apply_cancellability(step: CancellabilityStep,
                         assumptions: Sequence[Polynomial],
                         order: Optional[DegLexOrder] = None,
                         limits: Optional[CompletionLimits] = None, *,
                         assumption_names: Optional[Sequence[str]] = None,
                         workers: int = 1,
                         require_zero_constant: bool = True):
    """Certify the witness in the current ideal and return the conclusion.

    Returns ``(conclusion, witness_certificate)``; raises WorkflowError when
    the witness cannot be certified within the limits (no assumption is added
    in that case).
    """
    validate_step(step)
    report = certify(list(assumptions), [step.witness], order, limits,
                     assumption_names=assumption_names,
                     claim_names=["witness"], workers=workers,
                     require_zero_constant=require_zero_constant)
    res = report.results[0]
    if not res.certified:
        raise WorkflowError(
            "cancellability witness is not certified within the limits; "
            f"irreducible remainder: {res.remainder}")
    return step.conclusion, res.certificate


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------

@dataclass
class ProblemOptions:
    limits: CompletionLimits = field(default_factory=CompletionLimits)
    closure: bool = False
    ranking: Optional[list] = None  # list of names for the order
    workers: int = 1
    allow_constant_terms: bool = False


@dataclass
class Problem:
    """A declared certification problem (operators, statements, workflow)."""

    algebra: FreeAlgebra
    defs: dict
    assumptions: list   # (name, Polynomial)
    claims: list        # (name, Polynomial)
    quiver: Optional[LabelledQuiver] = None
    pinned: dict = field(default_factory=dict)  # iid -> (src, tgt)
    workflow: list = field(default_factory=list)
    options: ProblemOptions = field(default_factory=ProblemOptions)

    def order(self) -> DegLexOrder:
        if self.options.ranking:
            return DegLexOrder.from_names(self.algebra, self.options.ranking)
        return self.algebra.default_order()


@dataclass
class WorkflowReport:
    step: CancellabilityStep
    conclusion_name: str
    certificate: Certificate


@dataclass
class Translation:
    """translate() output: the polynomial-level problem, ready to certify."""

    algebra: FreeAlgebra
    assumption_names: list
    assumptions: list
    claim_names: list
    claims: list
    quiver: Optional[LabelledQuiver]
    quiver_check: Optional[ProblemCheck]
    workflow_reports: list
    order: DegLexOrder
    options: ProblemOptions

    @property
    def indeterminate_count(self) -> int:
        return len(self.algebra)


def translate(problem: Problem, workers: Optional[int] = None) -> Translation:
    """Expand a problem into assumption/claim polynomials plus the quiver.

    Applies the involution closure when declared, runs workflow steps in
    order (each step's witness is certified against the current assumption
    set, monotonically enlarging the ideal), and infers or validates the
    quiver.
    """
    alg = problem.algebra
    order = problem.order()
    opts = problem.options
    workers = opts.workers if workers is None else workers
    names = [n for n, _ in problem.assumptions]
    polys = [p for _, p in problem.assumptions]

    def close_into(new_names, new_polys):
        # append adjoints not yet present up to sign and scalar
        seen = {_monic_key(p, order) for p in polys if p}
        for name, p in list(zip(new_names, new_polys)):
            if p.is_zero:
                continue
            q = p.adjoint()
            key = _monic_key(q, order)
            if key not in seen:
                seen.add(key)
                names.append(name + "*")
                polys.append(q)

    if opts.closure:
        close_into(list(names), list(polys))
    reports = []
    for k, step in enumerate(problem.workflow, start=1):
        conclusion, cert = apply_cancellability(
            step, polys, order, opts.limits, assumption_names=names,
            workers=workers,
            require_zero_constant=not opts.allow_constant_terms)
        base = f"step{k}"
        names.append(base)
        polys.append(conclusion)
        if opts.closure:
            close_into([base], [conclusion])
        reports.append(WorkflowReport(step, base, cert))
    claims = [p for _, p in problem.claims]
    claim_names = [n for n, _ in problem.claims]
    quiver = problem.quiver
    if quiver is None:
        quiver = infer_signatures(polys + claims, alg, pinned=problem.pinned)
    else:
        for iid, sig in problem.pinned.items():
            if quiver.edges.get(iid) != sig:
                raise AlgebraError(
                    f"declared signature of {alg.by_id(iid).name!r} contradicts "
                    "the quiver section")
    qcheck = None
    if quiver is not None:
        qcheck = check_problem(polys, claims, quiver,
                               assumption_names=names, claim_names=claim_names)
    return Translation(alg, names, polys, claim_names, claims, quiver, qcheck,
                       reports, order, opts)


def run_problem(problem: Problem, workers: Optional[int] = None,
                limits: Optional[CompletionLimits] = None):
    """translate + certify; returns (Translation, CertifyReport)."""
    trans = translate(problem, workers=workers)
    opts = problem.options
    report = certify(trans.assumptions, trans.claims, trans.order,
                     limits or opts.limits,
                     assumption_names=trans.assumption_names,
                     claim_names=trans.claim_names,
                     workers=opts.workers if workers is None else workers,
                     require_zero_constant=not opts.allow_constant_terms)
    return trans, report


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------

_SECTIONS = ("ops", "defs", "quiver", "assume", "workflow", "claim", "options")
_SUBSET_RE = re.compile(r"\{([0-9,\s]*)\}")


class ProblemFileError(AlgebraError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _split_top_level(text: str, sep: str = ",") -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def load_problem(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def parse_problem(text: str) -> Problem:
    """Parse the sectioned problem format (see README for the grammar)."""
    alg = FreeAlgebra()
    problem = Problem(alg, {}, [], [])
    section = None
    quiver_vertices: list = []
    quiver_edges: list = []
    saw_quiver = False
    auto_names = {"assume": 0, "claim": 0}

    def expr(s: str, line_no: int) -> Polynomial:
        try:
            return alg.parse(s, defs=problem.defs)
        except ParseError as exc:
            raise ProblemFileError(f"{exc} in {s!r}", line_no) from None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ProblemFileError(f"unknown section [{section}]", line_no)
            if section == "quiver":
                saw_quiver = True
            continue
        if section is None:
            raise ProblemFileError("content before any [section]", line_no)
        try:
            if section == "ops":
                _parse_op_line(problem, line, line_no)
            elif section == "defs":
                name, _, body = line.partition("=")
                name = name.strip()
                if not _is_name(name) or not body.strip():
                    raise ProblemFileError("defs lines read: name = expression",
                                           line_no)
                if name in alg._by_name or name in problem.defs:
                    raise ProblemFileError(f"name {name!r} already taken", line_no)
                problem.defs[name] = expr(body.strip(), line_no)
            elif section == "quiver":
                if line.startswith("vertices"):
                    quiver_vertices.extend(line.split()[1:])
                else:
                    m = re.match(r"(.+?):(.+?)->(.+)", line)
                    if not m:
                        raise ProblemFileError(
                            "quiver edges read: label : source -> target", line_no)
                    quiver_edges.append((m.group(1).strip(), m.group(2).strip(),
                                         m.group(3).strip()))
            elif section in ("assume", "claim"):
                _parse_statement_line(problem, section, line, line_no,
                                      auto_names, expr)
            elif section == "workflow":
                _parse_workflow_line(problem, line, line_no, expr)
            elif section == "options":
                _parse_option_line(problem, line, line_no)
        except ProblemFileError:
            raise
        except AlgebraError as exc:
            raise ProblemFileError(str(exc), line_no) from None
    if saw_quiver:
        problem.quiver = LabelledQuiver(alg, quiver_vertices, quiver_edges)
    return problem


def _is_name(s: str) -> bool:
    return bool(s) and " " not in s and "=" not in s


def _parse_op_line(problem: Problem, line: str, line_no: int) -> None:
    alg = problem.algebra
    sig = None
    if ":" in line:
        head, _, rest = line.partition(":")
        m = re.match(r"(.+?)->(.+)", rest)
        if not m:
            raise ProblemFileError("op signatures read: name ... : src -> tgt",
                                   line_no)
        sig = (m.group(1).strip(), m.group(2).strip())
        line = head.strip()
    words = line.split()
    if len(words) == 1:
        ind = alg.add(words[0])
    elif len(words) == 2 and words[1] == "selfadjoint":
        ind = alg.add_self_adjoint(words[0])
    elif len(words) == 2 and words[1] == "adjoint":
        ind, _ = alg.add_pair(words[0])
    elif len(words) == 3 and words[1] == "adjoint":
        ind, _ = alg.add_pair(words[0], words[2])
    else:
        raise ProblemFileError(
            "ops lines read: name [adjoint [partner] | selfadjoint] [: src -> tgt]",
            line_no)
    if sig is not None:
        problem.pinned[ind.iid] = sig


_MACROS = ("mp", "inv", "id", "douglas", "hermitian", "ep")


def _parse_statement_line(problem, section, line, line_no, auto_names, expr):
    alg = problem.algebra
    name = None
    body = line
    eq = line.find("=")
    if eq > 0:
        candidate = line[:eq].strip()
        if _is_name(candidate) and not any(
                line[:eq].strip().startswith(m + "(") for m in _MACROS):
            name, body = candidate, line[eq + 1:].strip()
    m = re.match(r"([a-z]+)\((.*)\)\s*$", body)
    produced: list = []
    if m and m.group(1) in _MACROS:
        produced = _expand_macro(problem, m.group(1), m.group(2), line_no, expr)
        if name is not None:
            produced = [(f"{name}.{k + 1}" if len(produced) > 1 else name, p)
                        for k, (_, p) in enumerate(produced)]
    else:
        if name is None:
            auto_names[section] += 1
            prefix = "f" if section == "assume" else "claim"
            name = f"{prefix}{auto_names[section]}"
        produced = [(name, expr(body, line_no))]
    target = problem.assumptions if section == "assume" else problem.claims
    taken = {n for n, _ in problem.assumptions} | {n for n, _ in problem.claims}
    for n, p in produced:
        if n in taken:
            raise ProblemFileError(f"duplicate statement name {n!r}", line_no)
        taken.add(n)
        target.append((n, p))


def _expand_macro(problem, macro, args, line_no, expr):
    alg = problem.algebra
    if macro == "mp":
        parts = _split_top_level(args)
        if len(parts) != 2:
            raise ProblemFileError("mp takes two arguments", line_no)
        x, y = expr(parts[0], line_no), expr(parts[1], line_no)
        label = f"mp({parts[0]},{parts[1]})"
        return [(f"{label}.{k}", p)
                for k, p in enumerate(mp_equations(x, y, alg), start=1)]
    if macro == "inv":
        parts = _split_top_level(args)
        if len(parts) != 3:
            raise ProblemFileError("inv takes (x, y, {i,...,j})", line_no)
        sub = _SUBSET_RE.match(parts[2].replace(" ", ""))
        if not sub:
            raise ProblemFileError("inv subset reads {1,3}", line_no)
        ks = [int(s) for s in sub.group(1).split(",") if s]
        x, y = expr(parts[0], line_no), expr(parts[1], line_no)
        label = f"inv({parts[0]},{parts[1]})"
        return [(f"{label}.{k}", p)
                for k, p in zip(sorted(set(ks)), ij_equations(x, y, ks, alg))]
    if macro == "id":
        head, _, tail = args.partition(";")
        unit = expr(head.strip(), line_no)
        neighbors = []
        for item in _split_top_level(tail):
            if not item:
                continue
            nm, _, side = item.partition(":")
            neighbors.append((expr(nm.strip(), line_no), side.strip()))
        label = f"id({head.strip()})"
        return [(f"{label}.{k}", p) for k, p in
                enumerate(identity_axioms(unit, neighbors, alg), start=1)]
    if macro == "douglas":
        witness = None
        parts = _split_top_level(args)
        if len(parts) == 2:
            wm = re.match(r"witness\s+(\S+)$", parts[1])
            if not wm:
                raise ProblemFileError(
                    "douglas reads douglas(lhs ⊆ rhs[, witness name])", line_no)
            witness = wm.group(1)
        elif len(parts) != 1:
            raise ProblemFileError("douglas takes one inclusion", line_no)
        rel = parts[0]
        for sym, flip in (("⊆", False), ("<=", False),
                          ("⊇", True), (">=", True)):
            if sym in rel:
                lhs_s, rhs_s = rel.split(sym, 1)
                break
        else:
            raise ProblemFileError("douglas needs ⊆/⊇ (or <=/>=)", line_no)
        lhs, rhs = expr(lhs_s.strip(), line_no), expr(rhs_s.strip(), line_no)
        if flip:
            lhs, rhs = rhs, lhs
        w, p = douglas_factorization(alg, lhs, rhs, witness)
        return [(f"douglas({w.name})", p)]
    if macro == "hermitian":
        x = expr(args.strip(), line_no)
        return [(f"hermitian({args.strip()})", hermitian_condition(x))]
    if macro == "ep":
        x = expr(args.strip(), line_no)
        out = []
        for w, p in ep_condition(alg, x):
            out.append((f"ep({args.strip()},{w.name})", p))
        return out
    raise ProblemFileError(f"unknown macro {macro}", line_no)


def _parse_workflow_line(problem, line, line_no, expr):
    m = re.match(r"cancel\s+(left|right)\s+(.+?)\s+witness\s+(.+?)\s+conclude\s+(.+)$",
                 line)
    if not m:
        raise ProblemFileError(
            "workflow lines read: cancel left|right ELEM witness EXPR conclude EXPR",
            line_no)
    side, elem_s, wit_s, conc_s = m.groups()
    step = CancellabilityStep(side, expr(elem_s, line_no),
                              expr(wit_s, line_no), expr(conc_s, line_no))
    try:
        validate_step(step)
    except WorkflowError as exc:
        raise ProblemFileError(str(exc), line_no) from None
    problem.workflow.append(step)


def _parse_option_line(problem, line, line_no):
    opts = problem.options
    words = line.split()
    key, rest = words[0], words[1:]
    known = ("max_degree", "max_iterations", "max_basis_size", "time_budget",
             "closure", "allow_constant_terms", "workers", "order")
    if key not in known:
        raise ProblemFileError(f"unknown option {key!r}", line_no)
    lim = opts.limits
    try:
        if key == "max_degree":
            opts.limits = CompletionLimits(int(rest[0]), lim.max_iterations,
                                           lim.max_basis_size, lim.time_budget)
        elif key == "max_iterations":
            opts.limits = CompletionLimits(lim.max_degree, int(rest[0]),
                                           lim.max_basis_size, lim.time_budget)
        elif key == "max_basis_size":
            opts.limits = CompletionLimits(lim.max_degree, lim.max_iterations,
                                           int(rest[0]), lim.time_budget)
        elif key == "time_budget":
            opts.limits = CompletionLimits(lim.max_degree, lim.max_iterations,
                                           lim.max_basis_size, float(rest[0]))
        elif key == "closure":
            opts.closure = _on_off(rest[0], line_no)
        elif key == "allow_constant_terms":
            opts.allow_constant_terms = _on_off(rest[0], line_no)
        elif key == "workers":
            opts.workers = int(rest[0])
        elif key == "order":
            opts.ranking = rest
    except ProblemFileError:
        raise
    except (IndexError, ValueError):
        raise ProblemFileError(f"bad value for option {key!r}", line_no) from None


def _on_off(s: str, line_no: int) -> bool:
    if s in ("on", "true", "yes", "1"):
        return True
    if s in ("off", "false", "no", "0"):
        return False
    raise ProblemFileError(f"expected on/off, got {s!r}", line_no)
