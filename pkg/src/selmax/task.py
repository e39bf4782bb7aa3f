"""Ground SAS-style planning tasks: data model, SAS-lite text format, successor generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

State = tuple[int, ...]
Assignment = tuple[tuple[int, int], ...]

FORMAT_HEADER = ("sas-lite", "1")


class TaskFormatError(ValueError):
    """Malformed SAS-lite input. ``line``/``col`` are 1-based; 0 means unknown."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


class TaskSyntaxError(TaskFormatError):
    pass


class DomainRangeError(TaskFormatError):
    pass


class DuplicateVariableError(TaskFormatError):
    pass


class MissingSectionError(TaskFormatError):
    pass


class InapplicableActionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    value_names: tuple[str, ...]

    @property
    def domain_size(self) -> int:
        return len(self.value_names)


@dataclass(frozen=True)
class Action:
    name: str
    pre: Assignment
    eff: Assignment
    cost: float = 1.0


@dataclass(frozen=True)
class Task:
    variables: tuple[Variable, ...]
    actions: tuple[Action, ...]
    init: State
    goal: Assignment
    name: str = field(default="task", compare=False)

    def __post_init__(self):
        validate(self)

    @property
    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(v.domain_size for v in self.variables)

    @cached_property
    def _succ_index(self) -> tuple[tuple[int, ...], dict[tuple[int, int], tuple[tuple[int, Assignment], ...]]]:
        # Actions bucketed by their most selective precondition (largest domain);
        # each entry keeps the remaining preconditions to check.
        sizes = self.domain_sizes
        free = []
        buckets: dict[tuple[int, int], list[tuple[int, Assignment]]] = {}
        for i, a in enumerate(self.actions):
            if a.pre:
                key = max(a.pre, key=lambda p: sizes[p[0]])
                rest = tuple(p for p in a.pre if p != key)
                buckets.setdefault(key, []).append((i, rest))
            else:
                free.append(i)
        return tuple(free), {k: tuple(v) for k, v in buckets.items()}

    @cached_property
    def unit_cost(self) -> bool:
        return all(a.cost == 1 for a in self.actions)

    @cached_property
    def min_action_cost(self) -> float:
        return min((a.cost for a in self.actions), default=0.0)

    def applicable_actions(self, s: State) -> list[int]:
        """Indices of the actions applicable in ``s``, in increasing order."""
        free, buckets = self._succ_index
        out = list(free)
        get = buckets.get
        for v, val in enumerate(s):
            for i, rest in get((v, val), ()):
                for pv, pval in rest:
                    if s[pv] != pval:
                        break
                else:
                    out.append(i)
        out.sort()
        return out

    def successors(self, s: State) -> list[tuple[Action, State]]:
        return [(self.actions[i], _apply(s, self.actions[i])) for i in self.applicable_actions(s)]

    def successor_ids(self, s: State) -> list[tuple[int, State]]:
        return [(i, _apply(s, self.actions[i])) for i in self.applicable_actions(s)]

    def is_goal(self, s: State) -> bool:
        return entails(s, self.goal)


def entails(s: State, pa: Assignment) -> bool:
    return all(s[v] == val for v, val in pa)


def applicable(s: State, a: Action) -> bool:
    return entails(s, a.pre)


def _apply(s: State, a: Action) -> State:
    out = list(s)
    for v, val in a.eff:
        out[v] = val
    return tuple(out)


def apply(s: State, a: Action) -> State:
    if not applicable(s, a):
        raise InapplicableActionError(f"action {a.name!r} is not applicable")
    return _apply(s, a)


def successors(task: Task, s: State) -> list[tuple[Action, State]]:
    return task.successors(s)


def is_goal(task: Task, s: State) -> bool:
    return task.is_goal(s)


def validate_plan(task: Task, plan: Sequence[int | str]) -> tuple[bool, float]:
    """Check a plan given as action indices or names; return (valid, cost)."""
    by_name = {a.name: i for i, a in enumerate(task.actions)}
    s = task.init
    cost = 0.0
    for step in plan:
        a = task.actions[by_name[step] if isinstance(step, str) else step]
        if not applicable(s, a):
            return False, cost
        s = _apply(s, a)
        cost += a.cost
    return task.is_goal(s), cost


def make_assignment(pairs: Iterable[tuple[int, int]]) -> Assignment:
    return tuple(sorted(pairs))


def validate(task: Task) -> None:
    n = len(task.variables)
    sizes = [v.domain_size for v in task.variables]
    for v in task.variables:
        if v.domain_size < 1:
            raise DomainRangeError(f"variable {v.name!r} has an empty domain")
    if len(task.init) != n:
        raise DomainRangeError(f"init has {len(task.init)} values for {n} variables")
    for var, val in enumerate(task.init):
        if not 0 <= val < sizes[var]:
            raise DomainRangeError(f"init value {val} out of range for variable {var}")

    def check(pa: Assignment, what: str) -> None:
        seen = set()
        prev = -1
        for var, val in pa:
            if var in seen:
                raise DuplicateVariableError(f"variable {var} appears twice in {what}")
            seen.add(var)
            if var <= prev:
                raise TaskSyntaxError(f"{what} is not in canonical order")
            prev = var
            if not 0 <= var < n:
                raise DomainRangeError(f"variable index {var} out of range in {what}")
            if not 0 <= val < sizes[var]:
                raise DomainRangeError(f"value {val} out of range for variable {var} in {what}")

    check(task.goal, "goal")
    for a in task.actions:
        if not a.eff:
            raise TaskSyntaxError(f"action {a.name!r} has no effects")
        if a.cost < 0:
            raise DomainRangeError(f"action {a.name!r} has negative cost")
        check(a.pre, f"pre of {a.name!r}")
        check(a.eff, f"eff of {a.name!r}")


# ---------------------------------------------------------------- SAS-lite I/O


class _Lines:
    def __init__(self, text: str):
        self.rows: list[tuple[int, list[tuple[str, int]]]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0]
            toks = []
            col = 0
            for part in body.split():
                col = body.index(part, col)
                toks.append((part, col + 1))
                col += len(part)
            if toks:
                self.rows.append((lineno, toks))
        self.pos = 0
        self.last_line = self.rows[-1][0] if self.rows else 1

    def next(self, keyword: str) -> tuple[int, list[tuple[str, int]]]:
        if self.pos >= len(self.rows):
            raise MissingSectionError(f"missing section {keyword!r}", self.last_line, 1)
        lineno, toks = self.rows[self.pos]
        if toks[0][0] != keyword:
            if toks[0][0] in _KEYWORDS:
                raise MissingSectionError(
                    f"missing section {keyword!r} (found {toks[0][0]!r})", lineno, toks[0][1]
                )
            raise TaskSyntaxError(f"expected {keyword!r}, got {toks[0][0]!r}", lineno, toks[0][1])
        self.pos += 1
        return lineno, toks


_KEYWORDS = {"sas-lite", "vars", "var", "init", "goal", "ops", "op"}


def _int(tok: tuple[str, int], lineno: int, what: str) -> int:
    try:
        val = int(tok[0])
    except ValueError:
        raise TaskSyntaxError(f"expected integer {what}, got {tok[0]!r}", lineno, tok[1]) from None
    if val < 0:
        raise TaskSyntaxError(f"negative {what} {val}", lineno, tok[1])
    return val


def _expect_len(toks, n, lineno):
    if len(toks) != n:
        col = toks[min(n, len(toks)) - 1][1] if toks else 1
        raise TaskSyntaxError(f"expected {n} tokens, got {len(toks)}", lineno, col)


def _pairs(toks, start, count, lineno, sizes, what) -> tuple[Assignment, int]:
    out = {}
    i = start
    for _ in range(count):
        if i >= len(toks):
            raise TaskSyntaxError(f"{what}: expected {count} pairs", lineno, toks[-1][1])
        text, col = toks[i]
        if text.count("=") != 1:
            raise TaskSyntaxError(f"{what}: expected <var>=<val>, got {text!r}", lineno, col)
        v, val = text.split("=")
        try:
            v, val = int(v), int(val)
        except ValueError:
            raise TaskSyntaxError(f"{what}: non-integer pair {text!r}", lineno, col) from None
        if not 0 <= v < len(sizes):
            raise DomainRangeError(f"{what}: variable index {v} out of range", lineno, col)
        if not 0 <= val < sizes[v]:
            raise DomainRangeError(f"{what}: value {val} out of range for variable {v}", lineno, col)
        if v in out:
            raise DuplicateVariableError(f"{what}: variable {v} assigned twice", lineno, col)
        out[v] = val
        i += 1
    return tuple(sorted(out.items())), i


def parse_cost(text: str) -> float:
    try:
        c = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(text) from None
    if c < 0:
        raise ValueError(text)
    return float(c)


def parse_task(text: str, name: str = "task") -> Task:
    lines = _Lines(text)
    lineno, toks = lines.next("sas-lite")
    if len(toks) != 2 or toks[1][0] != FORMAT_HEADER[1]:
        raise TaskSyntaxError("unsupported header, expected 'sas-lite 1'", lineno, toks[0][1])

    lineno, toks = lines.next("vars")
    _expect_len(toks, 2, lineno)
    nvars = _int(toks[1], lineno, "variable count")
    variables = []
    for _ in range(nvars):
        lineno, toks = lines.next("var")
        if len(toks) < 3:
            raise TaskSyntaxError("var line needs a name and a domain size", lineno, toks[0][1])
        k = _int(toks[2], lineno, "domain size")
        if k < 1:
            raise DomainRangeError("domain size must be at least 1", lineno, toks[2][1])
        _expect_len(toks, 3 + k, lineno)
        variables.append(Variable(toks[1][0], tuple(t for t, _ in toks[3:])))
    sizes = [v.domain_size for v in variables]

    lineno, toks = lines.next("init")
    _expect_len(toks, 1 + nvars, lineno)
    init = []
    for v, tok in enumerate(toks[1:]):
        val = _int(tok, lineno, "init value")
        if val >= sizes[v]:
            raise DomainRangeError(f"init value {val} out of range for variable {v}", lineno, tok[1])
        init.append(val)

    lineno, toks = lines.next("goal")
    if len(toks) < 2:
        raise TaskSyntaxError("goal line needs a pair count", lineno, toks[0][1])
    m = _int(toks[1], lineno, "goal size")
    goal, end = _pairs(toks, 2, m, lineno, sizes, "goal")
    if end != len(toks):
        raise TaskSyntaxError("trailing tokens after goal", lineno, toks[end][1])

    lineno, toks = lines.next("ops")
    _expect_len(toks, 2, lineno)
    nops = _int(toks[1], lineno, "operator count")
    actions = []
    for _ in range(nops):
        lineno, toks = lines.next("op")
        if len(toks) < 6 or toks[2][0] != "cost" or toks[4][0] != "pre":
            raise TaskSyntaxError("expected 'op <name> cost <c> pre <p> ...'", lineno, toks[0][1])
        try:
            cost = parse_cost(toks[3][0])
        except ValueError:
            raise TaskSyntaxError(f"bad cost {toks[3][0]!r}", lineno, toks[3][1]) from None
        p = _int(toks[5], lineno, "precondition count")
        pre, i = _pairs(toks, 6, p, lineno, sizes, "pre")
        if i + 1 >= len(toks) or toks[i][0] != "eff":
            col = toks[i][1] if i < len(toks) else toks[-1][1]
            raise TaskSyntaxError("expected 'eff <e> ...'", lineno, col)
        e = _int(toks[i + 1], lineno, "effect count")
        if e < 1:
            raise TaskSyntaxError("an operator needs at least one effect", lineno, toks[i + 1][1])
        eff, end = _pairs(toks, i + 2, e, lineno, sizes, "eff")
        if end != len(toks):
            raise TaskSyntaxError("trailing tokens after effects", lineno, toks[end][1])
        actions.append(Action(toks[1][0], pre, eff, cost))

    if lines.pos != len(lines.rows):
        lineno, toks = lines.rows[lines.pos]
        raise TaskSyntaxError(f"unexpected content {toks[0][0]!r}", lineno, toks[0][1])
    return Task(tuple(variables), tuple(actions), tuple(init), goal, name=name)


def format_cost(c: float) -> str:
    if float(c).is_integer():
        return str(int(c))
    return repr(float(c))


def render_task(task: Task) -> str:
    def pairs(pa: Assignment) -> str:
        return " ".join(f"{v}={val}" for v, val in pa)

    out = ["sas-lite 1", f"vars {len(task.variables)}"]
    for v in task.variables:
        out.append(" ".join(["var", v.name, str(v.domain_size), *v.value_names]))
    out.append("init " + " ".join(map(str, task.init)))
    out.append(" ".join(filter(None, ["goal", str(len(task.goal)), pairs(task.goal)])))
    out.append(f"ops {len(task.actions)}")
    for a in task.actions:
        parts = ["op", a.name, "cost", format_cost(a.cost), "pre", str(len(a.pre))]
        if a.pre:
            parts.append(pairs(a.pre))
        parts += ["eff", str(len(a.eff)), pairs(a.eff)]
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"
