"""Pure-Python kernels: DPLL search, brute-force enumeration, rule chaining.

These are the hot inner loops of instance generation and verification. The
compiled backend in ``_speedups.pyx`` implements the same algorithms with the
same deterministic scan/branch order; both must produce identical results for
identical inputs (see tests/test_kernels.py).

Conventions shared by both backends:

* CNF clauses are sequences of non-zero ints; literal ``v > 0`` means variable
  ``v - 1`` is true, ``v < 0`` means variable ``-v - 1`` is false.
* Formula programs are flat postfix opcode lists built by
  ``reasonforge.logic.compile_program``.
* Assignment masks use bit ``j`` for the value of variable ``j``.
* "Lexicographic" enumeration means variable 0 is the most significant digit
  and false sorts before true: index ``i`` assigns variable ``j`` the bit
  ``(i >> (n - 1 - j)) & 1``.
"""

OP_VAR = 0
OP_NOT = 1
OP_AND = 2
OP_OR = 3
OP_XOR = 4
OP_IMPLIES = 5
OP_IFF = 6


def dpll_solve(clauses, num_vars):
    """DPLL with unit propagation and pure-literal elimination.

    Returns a list of 0/1 values per variable (variables never constrained by
    the search default to 0) or None when unsatisfiable. Deterministic:
    clauses are scanned in input order, branching picks the lowest-index
    unassigned variable occurring in the active formula and tries false
    before true.
    """
    cls = [tuple(c) for c in clauses]
    assign = [-1] * num_vars

    def clause_state(c):
        # (satisfied, number of unassigned literals, last unassigned literal)
        unassigned = 0
        last = 0
        for lit in c:
            v = assign[abs(lit) - 1]
            if v == -1:
                unassigned += 1
                last = lit
            elif (v == 1) == (lit > 0):
                return True, 0, 0
        return False, unassigned, last

    def propagate(trail):
        # Unit + pure-literal rounds to fixpoint; False on conflict.
        while True:
            unit = 0
            for c in cls:
                sat, unassigned, last = clause_state(c)
                if sat:
                    continue
                if unassigned == 0:
                    return False
                if unassigned == 1:
                    unit = last
                    break
            if unit:
                v = abs(unit) - 1
                assign[v] = 1 if unit > 0 else 0
                trail.append(v)
                continue
            seen_pos = [False] * num_vars
            seen_neg = [False] * num_vars
            for c in cls:
                sat, _, _ = clause_state(c)
                if sat:
                    continue
                for lit in c:
                    v = abs(lit) - 1
                    if assign[v] == -1:
                        if lit > 0:
                            seen_pos[v] = True
                        else:
                            seen_neg[v] = True
            assigned_any = False
            for v in range(num_vars):
                if seen_pos[v] != seen_neg[v]:
                    assign[v] = 1 if seen_pos[v] else 0
                    trail.append(v)
                    assigned_any = True
            if not assigned_any:
                return True

    def search():
        trail = []
        if not propagate(trail):
            for v in trail:
                assign[v] = -1
            return False
        branch = -1
        all_sat = True
        for c in cls:
            sat, _, _ = clause_state(c)
            if sat:
                continue
            all_sat = False
            for lit in c:
                v = abs(lit) - 1
                if assign[v] == -1 and (branch == -1 or v < branch):
                    branch = v
        if all_sat:
            return True
        for val in (0, 1):
            assign[branch] = val
            if search():
                return True
        assign[branch] = -1
        for v in trail:
            assign[v] = -1
        return False

    if search():
        return [0 if v == -1 else v for v in assign]
    return None


def _clause_masks(clauses):
    masks = []
    for c in clauses:
        pos = 0
        neg = 0
        for lit in c:
            if lit > 0:
                pos |= 1 << (lit - 1)
            else:
                neg |= 1 << (-lit - 1)
        masks.append((pos, neg))
    return masks


def cnf_first_sat(clauses, num_vars):
    """First satisfying assignment of a CNF in lexicographic order, or -1."""
    masks = _clause_masks(clauses)
    full = (1 << num_vars) - 1
    for i in range(1 << num_vars):
        m = 0
        for j in range(num_vars):
            if (i >> (num_vars - 1 - j)) & 1:
                m |= 1 << j
        ok = True
        for pos, neg in masks:
            if not (m & pos) and not (neg & ~m & full):
                ok = False
                break
        if ok:
            return i
    return -1


def prog_eval(prog, mask):
    """Evaluate a postfix formula program under an assignment mask."""
    stack = []
    i = 0
    n = len(prog)
    while i < n:
        op = prog[i]
        if op == OP_VAR:
            i += 1
            stack.append((mask >> prog[i]) & 1)
        elif op == OP_NOT:
            stack[-1] ^= 1
        else:
            b = stack.pop()
            a = stack[-1]
            if op == OP_AND:
                r = a & b
            elif op == OP_OR:
                r = a | b
            elif op == OP_XOR:
                r = a ^ b
            elif op == OP_IMPLIES:
                r = (a ^ 1) | b
            else:
                r = (a ^ b) ^ 1
            stack[-1] = r
        i += 1
    return bool(stack[-1])


def prog_first_sat(prog, num_vars):
    """First satisfying assignment of a formula program in lexicographic
    order, or -1."""
    for i in range(1 << num_vars):
        m = 0
        for j in range(num_vars):
            if (i >> (num_vars - 1 - j)) & 1:
                m |= 1 << j
        if prog_eval(prog, m):
            return i
    return -1


def progs_differ(prog_a, prog_b, num_vars):
    """First assignment mask on which two programs disagree, or -1."""
    for m in range(1 << num_vars):
        if prog_eval(prog_a, m) != prog_eval(prog_b, m):
            return m
    return -1


def chain_derives(num_atoms, bodies, heads, true_mask, false_mask, goal):
    """Forward-chain rules to fixpoint; True when ``goal`` ends up derived.

    ``true_mask`` seeds the fact set (known atoms assigned true); a negative
    body literal holds only when its atom bit is set in ``false_mask`` (known
    atoms assigned false).
    """
    facts = true_mask
    changed = True
    while changed:
        changed = False
        for r in range(len(bodies)):
            bit = 1 << heads[r]
            if facts & bit:
                continue
            fire = False
            for lit in bodies[r]:
                if lit > 0:
                    if (facts >> (lit - 1)) & 1:
                        fire = True
                        break
                elif (false_mask >> (-lit - 1)) & 1:
                    fire = True
                    break
            if fire:
                facts |= bit
                changed = True
    return bool((facts >> goal) & 1)


def goal_solution_masks(num_atoms, bodies, heads, enum_atoms, base_false_mask, goal):
    """Enumerate truth assignments over ``enum_atoms`` that derive ``goal``.

    Returns the list of masks ``m`` (bit ``i`` is the value of
    ``enum_atoms[i]``) in increasing numeric order. Atoms outside
    ``enum_atoms`` are seeded false via ``base_false_mask``.
    """
    out = []
    k = len(enum_atoms)
    all_enum = 0
    for a in enum_atoms:
        all_enum |= 1 << a
    for m in range(1 << k):
        tmask = 0
        for i in range(k):
            if (m >> i) & 1:
                tmask |= 1 << enum_atoms[i]
        fmask = base_false_mask | (all_enum & ~tmask)
        if chain_derives(num_atoms, bodies, heads, tmask, fmask, goal):
            out.append(m)
    return out
