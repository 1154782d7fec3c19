"""Unified machine model and simulators.

One configuration-level semantics covers every register machine in the
workbench: vector automata (VA), homing vector automata (HVA), finite
automata with a multiplicative register (FAM), generalized finite
automata (GFA), matrix-monoid extended finite automata, and integer
counter machines. A machine is a single immutable ``MachineSpec`` whose
flags select the variant:

* ``kind``       -- which register and acceptance semantics apply
* ``mode``       -- deterministic or nondeterministic choice of rules
* ``blind``      -- whether rules may branch on the register status
* ``endmarker``  -- whether a terminal ``$`` symbol is processed
* ``realtime``   -- ``False`` permits ``eps`` rules that consume no input

Acceptance by kind, checked after the last processed letter (the
end-marker included when ``endmarker`` is set):

* VA: accept state and first vector entry equal to 1
* HVA / ExtendedFA: accept state and vector equal to its initial value
* FAM: accept state and register equal to 1
* CounterMachine: accept state; when blind, additionally all counters 0
* GFA: acceptance value equal to the cutpoint

Simulators are pure functions of (spec, input, budget); specs are
immutable after validation, so evaluating many inputs in parallel is
safe.
"""

from __future__ import annotations

import weakref
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InconsistentSpecError,
    ShapeError,
    UndecidedError,
    UnsupportedKindError,
)
from .exact import Matrix, RowVector, tensor, vec_mat_mul

VA = "VA"
HVA = "HVA"
FAM = "FAM"
GFA = "GFA"
EXTENDED_FA = "ExtendedFA"
COUNTER_MACHINE = "CounterMachine"
KINDS = (VA, HVA, FAM, GFA, EXTENDED_FA, COUNTER_MACHINE)

DETERMINISTIC = "deterministic"
NONDETERMINISTIC = "nondeterministic"

EPSILON = "eps"
ENDMARKER = "$"

STATUS_EQ = "="
STATUS_NE = "!="
STATUS_ANY = "*"

ACCEPT = "Accept"
REJECT = "Reject"
BUDGET_EXCEEDED = "BudgetExceeded"

DEFAULT_MAX_CONFIGURATIONS = 1_000_000


@dataclass(frozen=True)
class TransitionRule:
    """One rule: in `source`, reading `input` under `status`, go to `target`.

    `effect` is the register update: a square matrix (right-multiplied)
    for vector kinds, or a tuple of per-counter increments in {-1, 0, 1}
    for counter machines. `input` is an alphabet symbol, `eps`, or `$`.
    `status` is `=`, `!=`, the wildcard `*`, or, for counter machines, a
    tuple of `=`/`!=` zero-tests, one per counter.
    """

    source: str
    input: str
    status: object
    target: str
    effect: object

    def status_key(self):
        s = self.status
        return tuple(s) if isinstance(s, (tuple, list)) else s


@dataclass(frozen=True)
class MachineSpec:
    kind: str
    mode: str
    blind: bool
    endmarker: bool
    realtime: bool
    alphabet: tuple
    states: tuple
    initial_state: str
    accept_states: frozenset
    dimension: int
    initial_vector: object
    transitions: tuple
    gfa_final_vector: object = None
    gfa_cutpoint: object = None

    def register_length(self) -> int:
        """Length of the register vector (dimension squared for monoid kinds)."""
        if self.kind == EXTENDED_FA:
            return self.dimension * self.dimension
        return self.dimension

    def rules_from(self, state: str, letter: str):
        return [r for r in self.transitions if r.source == state and r.input == letter]

    def has_epsilon_rules(self) -> bool:
        return any(r.input == EPSILON for r in self.transitions)

    def summary(self) -> dict:
        return {"kind": self.kind, "states": len(self.states), "dimension": self.dimension}


@dataclass(frozen=True)
class Configuration:
    """A point in a run: control state, register, input position, eps spent.

    `position` counts processed letters of `w$` (so it can reach
    `len(w) + 1` when the machine uses an end-marker).
    """

    state: str
    register: object
    position: int
    epsilon_spent: int = 0

    def key(self):
        return (self.state, self.position, self.register)


@dataclass(frozen=True)
class RunResult:
    verdict: str
    trace: tuple = None
    accepting_path: tuple = None

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPT


@dataclass(frozen=True)
class SearchBudget:
    """Bounds for nondeterministic search.

    One-way machines allow unbounded eps-loops whose register values
    never repeat, so exhaustive search is impossible in general. Paths
    that spend more than `eps_per_path` eps-moves are pruned (default:
    |states| * (|w| + 2)), and the whole search stops after
    `max_configurations` distinct configurations. Whenever pruning cut
    anything off and no accepting path was found, the result is
    BudgetExceeded rather than a misreported Reject.
    """

    eps_per_path: int = None
    max_configurations: int = DEFAULT_MAX_CONFIGURATIONS

    def eps_cap(self, spec: MachineSpec, word: str) -> int:
        if self.eps_per_path is not None:
            return self.eps_per_path
        return len(spec.states) * (len(word) + 2)


def make_spec(
    kind,
    mode,
    blind,
    endmarker,
    realtime,
    alphabet,
    states,
    initial_state,
    accept_states,
    dimension,
    initial_vector,
    transitions,
    gfa_final_vector=None,
    gfa_cutpoint=None,
) -> MachineSpec:
    """Build a MachineSpec, normalizing containers to immutable types."""
    if kind == COUNTER_MACHINE:
        initial_vector = tuple(int(x) for x in initial_vector)
    elif not isinstance(initial_vector, RowVector):
        initial_vector = RowVector(initial_vector)
    rules = []
    for r in transitions:
        effect = r.effect
        if kind == COUNTER_MACHINE and not isinstance(effect, tuple):
            effect = tuple(int(x) for x in effect)
        status = tuple(r.status) if isinstance(r.status, list) else r.status
        rules.append(TransitionRule(r.source, r.input, status, r.target, effect))
    if gfa_cutpoint is not None:
        gfa_cutpoint = Fraction(gfa_cutpoint)
    if gfa_final_vector is not None and not isinstance(gfa_final_vector, RowVector):
        gfa_final_vector = RowVector(gfa_final_vector)
    return MachineSpec(
        kind=kind,
        mode=mode,
        blind=bool(blind),
        endmarker=bool(endmarker),
        realtime=bool(realtime),
        alphabet=tuple(alphabet),
        states=tuple(states),
        initial_state=initial_state,
        accept_states=frozenset(accept_states),
        dimension=int(dimension),
        initial_vector=initial_vector,
        transitions=tuple(rules),
        gfa_final_vector=gfa_final_vector,
        gfa_cutpoint=gfa_cutpoint,
    )


def embed_monoid_effect(m: Matrix) -> Matrix:
    """Lift a k x k monoid element M to the k^2 x k^2 effect I tensor M.

    Right-multiplying a row-major-flattened k x k register X by
    I tensor M equals flattening X*M, so matrix-register machines run
    on the ordinary vector semantics.
    """
    if not m.is_square():
        raise ShapeError("monoid elements must be square matrices")
    return tensor(Matrix.identity(m.rows), m)


def flattened_identity(k: int) -> RowVector:
    return RowVector(Matrix.identity(k).entries)


# ---------------------------------------------------------------------------
# validation


def _legal_statuses(spec: MachineSpec, status) -> bool:
    if status == STATUS_ANY:
        return True
    if spec.kind == COUNTER_MACHINE:
        return (
            isinstance(status, tuple)
            and len(status) == spec.dimension
            and all(s in (STATUS_EQ, STATUS_NE) for s in status)
        )
    return status in (STATUS_EQ, STATUS_NE)


def _statuses_overlap(a, b) -> bool:
    if a == STATUS_ANY or b == STATUS_ANY:
        return True
    return a == b


def validate(spec: MachineSpec) -> list:
    """Check every structural invariant; returns one diagnostic per violation.

    An empty list means the spec is well-formed for its kind and flags.
    """
    diags = []

    def bad(msg):
        diags.append(msg)

    if spec.kind not in KINDS:
        bad(f"unknown kind: {spec.kind!r}")
        return diags
    if spec.mode not in (DETERMINISTIC, NONDETERMINISTIC):
        bad(f"unknown mode: {spec.mode!r}")
        return diags

    if not spec.states:
        bad("machine needs at least one state")
    if len(set(spec.states)) != len(spec.states):
        bad("duplicate state names")
    if spec.initial_state not in spec.states:
        bad(f"initial state {spec.initial_state!r} not among states")
    for q in spec.accept_states:
        if q not in spec.states:
            bad(f"accept state {q!r} not among states")
    if not spec.alphabet:
        bad("alphabet is empty")
    if len(set(spec.alphabet)) != len(spec.alphabet):
        bad("duplicate alphabet symbols")
    for sym in spec.alphabet:
        if sym in (EPSILON, ENDMARKER):
            bad(f"reserved symbol {sym!r} cannot be in the alphabet")
        elif len(sym) != 1:
            bad(f"alphabet symbols must be single characters, got {sym!r}")
    if spec.dimension < 1:
        bad(f"dimension must be >= 1, got {spec.dimension}")

    reg_len = spec.register_length()
    if spec.kind == COUNTER_MACHINE:
        if not (
            isinstance(spec.initial_vector, tuple)
            and len(spec.initial_vector) == spec.dimension
        ):
            bad("counter machine initial vector must have one integer per counter")
        elif any(spec.initial_vector):
            bad("counters must start at zero")
    else:
        if not isinstance(spec.initial_vector, RowVector):
            bad("initial vector must be a RowVector")
        elif spec.initial_vector.dim != reg_len:
            bad(
                f"initial vector has dim {spec.initial_vector.dim}, expected {reg_len}"
            )
        elif spec.kind == EXTENDED_FA and spec.initial_vector != flattened_identity(
            spec.dimension
        ):
            bad("matrix-monoid machines must start from the flattened identity")
        elif spec.kind == FAM and spec.initial_vector != RowVector([1]):
            bad("multiplicative registers must start at 1")

    if spec.mode == DETERMINISTIC and not spec.realtime:
        bad("deterministic machines must be real-time")

    if spec.kind == GFA:
        if spec.gfa_final_vector is None or spec.gfa_cutpoint is None:
            bad("GFA needs a final vector and a cutpoint")
        elif spec.gfa_final_vector.dim != spec.dimension:
            bad("GFA final vector dimension mismatch")
        if spec.endmarker:
            bad("GFA does not process an end-marker")
        if not spec.realtime:
            bad("GFA is real-time; eps rules are not allowed")
        if len(spec.states) != 1:
            bad("GFA control is carried by the matrices; use a single state")
        seen_syms = set()
        for r in spec.transitions:
            if r.input in seen_syms:
                bad(f"GFA must have exactly one matrix per symbol; {r.input!r} repeats")
            seen_syms.add(r.input)
        for sym in spec.alphabet:
            if sym not in seen_syms:
                bad(f"GFA is missing the matrix for symbol {sym!r}")
    else:
        if spec.gfa_final_vector is not None or spec.gfa_cutpoint is not None:
            bad("final vector / cutpoint are only meaningful for GFA")

    if spec.kind == EXTENDED_FA:
        if not spec.blind:
            bad("matrix-monoid machines are blind by definition")
        if spec.mode != NONDETERMINISTIC:
            bad("matrix-monoid machines are nondeterministic by definition")
    if spec.kind == FAM and spec.dimension != 1:
        bad("multiplicative-register machines are one-dimensional")

    for idx, r in enumerate(spec.transitions):
        where = f"transition #{idx} ({r.source},{r.input})"
        if r.source not in spec.states:
            bad(f"{where}: unknown source state")
        if r.target not in spec.states:
            bad(f"{where}: unknown target state")
        if r.input == EPSILON:
            if spec.realtime:
                bad(f"{where}: eps rule in a real-time machine")
            if spec.kind == GFA:
                bad(f"{where}: eps rule in a GFA")
        elif r.input == ENDMARKER:
            if not spec.endmarker:
                bad(f"{where}: end-marker rule but endmarker flag is off")
        elif r.input not in spec.alphabet:
            bad(f"{where}: symbol {r.input!r} not in alphabet")

        if not _legal_statuses(spec, r.status_key()):
            bad(f"{where}: malformed status {r.status!r}")
        if spec.blind and r.status_key() != STATUS_ANY:
            bad(f"{where}: blind machine must use the wildcard status")

        if spec.kind == COUNTER_MACHINE:
            eff = r.effect
            if not (isinstance(eff, tuple) and len(eff) == spec.dimension):
                bad(f"{where}: counter update must have one entry per counter")
            elif any(c not in (-1, 0, 1) for c in eff):
                bad(f"{where}: counter updates must lie in {{-1,0,1}}")
        else:
            eff = r.effect
            if not isinstance(eff, Matrix):
                bad(f"{where}: effect must be a matrix")
                continue
            if eff.rows != reg_len or eff.cols != reg_len:
                bad(f"{where}: effect is {eff.rows}x{eff.cols}, expected {reg_len}x{reg_len}")
                continue
            if spec.kind == FAM and any(e <= 0 for e in eff.entries):
                bad(f"{where}: multiplicative register updates must be positive")
            if spec.kind == EXTENDED_FA and not _is_identity_tensor(eff, spec.dimension):
                bad(f"{where}: effect is not of the form I tensor M")

    if spec.mode == DETERMINISTIC:
        groups = {}
        for idx, r in enumerate(spec.transitions):
            groups.setdefault((r.source, r.input), []).append((idx, r.status_key()))
        for (state, sym), rules in groups.items():
            for i in range(len(rules)):
                for j in range(i + 1, len(rules)):
                    if _statuses_overlap(rules[i][1], rules[j][1]):
                        bad(
                            f"deterministic conflict: transitions #{rules[i][0]} and "
                            f"#{rules[j][0]} both apply in ({state},{sym})"
                        )

    return diags


def _is_identity_tensor(eff: Matrix, k: int) -> bool:
    """True when eff is I_k tensor M for some k x k matrix M."""
    block = [[eff.entry(i, j) for j in range(k)] for i in range(k)]
    for bi in range(k):
        for bj in range(k):
            for i in range(k):
                for j in range(k):
                    e = eff.entry(bi * k + i, bj * k + j)
                    if bi == bj:
                        if e != block[i][j]:
                            return False
                    elif e:
                        return False
    return True


# ---------------------------------------------------------------------------
# run semantics


def _register_status(spec: MachineSpec, register):
    if spec.kind == GFA:
        raise UnsupportedKindError("GFA has no mid-run status")
    if spec.kind == COUNTER_MACHINE:
        return tuple(STATUS_EQ if c == 0 else STATUS_NE for c in register)
    if spec.kind == VA:
        return STATUS_EQ if register[0] == 1 else STATUS_NE
    if spec.kind == FAM:
        return STATUS_EQ if register == RowVector([1]) else STATUS_NE
    # HVA and ExtendedFA compare against the initial register
    return STATUS_EQ if register == spec.initial_vector else STATUS_NE


def status_of(spec: MachineSpec, config: Configuration):
    """Register status as seen by the transition function.

    VA tests its first entry against 1, HVA and monoid machines test the
    whole vector against the initial one, FAM tests the register against
    1, and counter machines return one zero-test per counter.
    """
    return _register_status(spec, config.register)


def _apply_effect(spec: MachineSpec, register, effect):
    if spec.kind == COUNTER_MACHINE:
        return tuple(c + d for c, d in zip(register, effect))
    return vec_mat_mul(register, effect)


# Register updates recur heavily across the runs of one machine (bounded
# enumeration re-walks shared prefixes), so each spec gets a memo from
# (rule index, register) to the updated register. Entries are exact and
# immutable; the table dies with the spec.
_EFFECT_MEMOS = weakref.WeakKeyDictionary()


def _effect_memo(spec: MachineSpec) -> dict:
    memo = _EFFECT_MEMOS.get(spec)
    if memo is None:
        memo = {}
        _EFFECT_MEMOS[spec] = memo
    return memo


def step(spec: MachineSpec, config: Configuration, letter: str) -> set:
    """All successor configurations of `config` on `letter`.

    `letter` is an alphabet symbol, `eps`, or `$`; the caller keeps it
    consistent with the position and the endmarker flag. A rule matches
    when its status is the wildcard or equals the current status; an
    empty result means every path through this configuration dies.
    """
    rules = spec.rules_from(config.state, letter)
    if not rules:
        return set()
    current = None
    out = set()
    for r in rules:
        sk = r.status_key()
        if sk != STATUS_ANY:
            if current is None:
                current = status_of(spec, config)
            if sk != current:
                continue
        out.add(
            Configuration(
                state=r.target,
                register=_apply_effect(spec, config.register, r.effect),
                position=config.position if letter == EPSILON else config.position + 1,
                epsilon_spent=config.epsilon_spent + (1 if letter == EPSILON else 0),
            )
        )
    return out


def acceptance_holds(spec: MachineSpec, register) -> bool:
    """Kind-specific register acceptance test (control state checked separately)."""
    if spec.kind == VA:
        return register[0] == 1
    if spec.kind == FAM:
        return register == RowVector([1])
    if spec.kind == COUNTER_MACHINE:
        return (not spec.blind) or all(c == 0 for c in register)
    if spec.kind in (HVA, EXTENDED_FA):
        return register == spec.initial_vector
    raise UnsupportedKindError(f"no register acceptance test for {spec.kind}")


def _letters(spec: MachineSpec, word: str) -> list:
    return list(word) + ([ENDMARKER] if spec.endmarker else [])


def initial_configuration(spec: MachineSpec) -> Configuration:
    return Configuration(spec.initial_state, spec.initial_vector, 0, 0)


def run_deterministic(spec: MachineSpec, word: str) -> RunResult:
    """Run a deterministic machine, recording the full configuration trace.

    A configuration with no applicable rule ends the run as a Reject
    with the trace truncated at the point of death.
    """
    if spec.mode != DETERMINISTIC:
        raise InconsistentSpecError("run_deterministic needs a deterministic machine")
    index = {}
    for idx, r in enumerate(spec.transitions):
        index.setdefault((r.source, r.input), []).append((idx, r.status_key(), r.effect, r.target))
    memo = _effect_memo(spec)

    config = initial_configuration(spec)
    trace = [config]
    for letter in _letters(spec, word):
        matched = []
        current_status = None
        for rule_idx, status_key, effect, target in index.get((config.state, letter), ()):
            if status_key != STATUS_ANY:
                if current_status is None:
                    current_status = _register_status(spec, config.register)
                if status_key != current_status:
                    continue
            matched.append((rule_idx, effect, target))
        if not matched:
            return RunResult(REJECT, trace=tuple(trace))
        if len(matched) > 1:
            raise InconsistentSpecError(
                f"deterministic machine has {len(matched)} successors in "
                f"({config.state},{letter})"
            )
        rule_idx, effect, target = matched[0]
        memo_key = (rule_idx, config.register)
        register = memo.get(memo_key)
        if register is None:
            register = _apply_effect(spec, config.register, effect)
            memo[memo_key] = register
        config = Configuration(
            state=target,
            register=register,
            position=config.position if letter == EPSILON else config.position + 1,
            epsilon_spent=config.epsilon_spent + (1 if letter == EPSILON else 0),
        )
        trace.append(config)
    accepted = config.state in spec.accept_states and acceptance_holds(spec, config.register)
    return RunResult(ACCEPT if accepted else REJECT, trace=tuple(trace))


def run_nondeterministic(spec: MachineSpec, word: str, budget: SearchBudget = None) -> RunResult:
    """Breadth-first search over configurations with exact deduplication.

    Configurations are deduplicated on (state, position, register);
    exact rationals make that sound, and without it blind search blows
    up on diamond-shaped nondeterminism. Accept as soon as any explored
    path satisfies the acceptance condition; Reject only when the whole
    reachable space was exhausted with nothing pruned by the budget.
    """
    if budget is None:
        budget = SearchBudget()
    eps_cap = budget.eps_cap(spec, word)
    end_position = len(word) + (1 if spec.endmarker else 0)
    endmarker = spec.endmarker
    realtime = spec.realtime
    is_counter = spec.kind == COUNTER_MACHINE
    accept_states = spec.accept_states

    index = {}
    for idx, r in enumerate(spec.transitions):
        index.setdefault((r.source, r.input), []).append(
            (idx, r.status_key(), r.effect, r.target)
        )
    memo = _effect_memo(spec)

    # configurations are (state, position, register) keys; the queue
    # carries the eps count separately since it only matters for budget
    start_key = (spec.initial_state, 0, spec.initial_vector)
    parents = {start_key: None}
    queue = deque([(start_key, 0)])
    pruned = False
    expanded = 0

    def accepting_path(key):
        path = []
        while parents[key] is not None:
            key, rule_idx = parents[key]
            path.append(rule_idx)
        return tuple(reversed(path))

    while queue:
        key, eps_spent = queue.popleft()
        state, position, register = key
        if position == end_position:
            if state in accept_states and acceptance_holds(spec, register):
                return RunResult(ACCEPT, accepting_path=accepting_path(key))
            if endmarker:
                continue  # the end-marker closes the computation
        if expanded >= budget.max_configurations:
            pruned = True
            continue  # keep draining the queue for acceptance checks only
        expanded += 1

        moves = []
        if not realtime:
            if eps_spent < eps_cap:
                moves.append((EPSILON, position, eps_spent + 1))
            elif index.get((state, EPSILON)):
                pruned = True
        if position < len(word):
            moves.append((word[position], position + 1, eps_spent))
        elif position == len(word) and endmarker:
            moves.append((ENDMARKER, position + 1, eps_spent))

        for letter, next_position, next_eps in moves:
            rules = index.get((state, letter))
            if not rules:
                continue
            current_status = None
            for rule_idx, status_key, effect, target in rules:
                if status_key != STATUS_ANY:
                    if current_status is None:
                        current_status = _register_status(spec, register)
                    if status_key != current_status:
                        continue
                memo_key = (rule_idx, register)
                next_register = memo.get(memo_key)
                if next_register is None:
                    if is_counter:
                        next_register = tuple(c + d for c, d in zip(register, effect))
                    else:
                        next_register = vec_mat_mul(register, effect)
                    memo[memo_key] = next_register
                next_key = (target, next_position, next_register)
                if next_key in parents:
                    continue
                parents[next_key] = (key, rule_idx)
                queue.append((next_key, next_eps))

    return RunResult(BUDGET_EXCEEDED if pruned else REJECT)


def gfa_value(spec: MachineSpec, word: str) -> Fraction:
    """Acceptance value v0 * A_w[1] * ... * A_w[n] * f of a GFA."""
    if spec.kind != GFA:
        raise UnsupportedKindError("gfa_value needs a GFA")
    matrices = {r.input: r.effect for r in spec.transitions}
    v = spec.initial_vector
    for sym in word:
        v = vec_mat_mul(v, matrices[sym])
    return sum(a * b for a, b in zip(v, spec.gfa_final_vector))


def accepts(spec: MachineSpec, word: str, budget: SearchBudget = None) -> bool:
    """Language membership verdict; assumes the spec validates cleanly.

    Raises UndecidedError when nondeterministic search runs out of
    budget, so an unfinished search is never reported as a Reject.
    """
    if spec.kind == GFA:
        return gfa_value(spec, word) == spec.gfa_cutpoint
    if spec.mode == DETERMINISTIC:
        return run_deterministic(spec, word).accepted
    result = run_nondeterministic(spec, word, budget)
    if result.verdict == BUDGET_EXCEEDED:
        raise UndecidedError(
            f"search budget exhausted on input {word!r}",
            word=word,
            budget=budget or SearchBudget(),
        )
    return result.accepted


def extendedfa_embed(spec: MachineSpec) -> MachineSpec:
    """Recast a matrix-monoid machine as a blind nondeterministic HVA.

    The register of a k x k matrix-monoid machine is already simulated
    as a row-major-flattened vector of length k^2 with effects of the
    form I tensor M, so the embedding re-labels the kind and dimension;
    identity-register acceptance becomes vector-equals-initial
    acceptance over the flattened identity.
    """
    if spec.kind != EXTENDED_FA:
        raise UnsupportedKindError("extendedfa_embed needs a matrix-monoid machine")
    return MachineSpec(
        kind=HVA,
        mode=NONDETERMINISTIC,
        blind=True,
        endmarker=False,
        realtime=spec.realtime,
        alphabet=spec.alphabet,
        states=spec.states,
        initial_state=spec.initial_state,
        accept_states=spec.accept_states,
        dimension=spec.dimension * spec.dimension,
        initial_vector=spec.initial_vector,
        transitions=spec.transitions,
    )
