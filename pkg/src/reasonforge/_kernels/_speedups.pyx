# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``pure.py`` operation for operation.

Both backends must stay in lockstep: same scan order, same branch order, same
results. Masks are limited to 62 bits here; callers guard enumeration sizes
long before that.
"""

from libc.stdlib cimport free, malloc

OP_VAR = 0
OP_NOT = 1
OP_AND = 2
OP_OR = 3
OP_XOR = 4
OP_IMPLIES = 5
OP_IFF = 6


cdef struct CnfState:
    int *lits
    int *start
    int n_clauses
    int num_vars
    int *assign
    signed char *seen_pos
    signed char *seen_neg


cdef int _clause_state(CnfState *s, int ci, int *unassigned, int *last) noexcept:
    cdef int j, lit, v, un = 0, la = 0
    for j in range(s.start[ci], s.start[ci + 1]):
        lit = s.lits[j]
        v = s.assign[(lit if lit > 0 else -lit) - 1]
        if v == -1:
            un += 1
            la = lit
        elif (v == 1) == (lit > 0):
            return 1
    unassigned[0] = un
    last[0] = la
    return 0


cdef int _propagate(CnfState *s, int *trail, int *tp) noexcept:
    cdef int ci, j, un, last, unit, v, lit, assigned_any
    while True:
        unit = 0
        for ci in range(s.n_clauses):
            if _clause_state(s, ci, &un, &last):
                continue
            if un == 0:
                return 0
            if un == 1:
                unit = last
                break
        if unit != 0:
            v = (unit if unit > 0 else -unit) - 1
            s.assign[v] = 1 if unit > 0 else 0
            trail[tp[0]] = v
            tp[0] += 1
            continue
        for v in range(s.num_vars):
            s.seen_pos[v] = 0
            s.seen_neg[v] = 0
        for ci in range(s.n_clauses):
            if _clause_state(s, ci, &un, &last):
                continue
            for j in range(s.start[ci], s.start[ci + 1]):
                lit = s.lits[j]
                v = (lit if lit > 0 else -lit) - 1
                if s.assign[v] == -1:
                    if lit > 0:
                        s.seen_pos[v] = 1
                    else:
                        s.seen_neg[v] = 1
        assigned_any = 0
        for v in range(s.num_vars):
            if s.seen_pos[v] != s.seen_neg[v]:
                s.assign[v] = 1 if s.seen_pos[v] else 0
                trail[tp[0]] = v
                tp[0] += 1
                assigned_any = 1
        if not assigned_any:
            return 1


cdef int _search(CnfState *s, int *trail, int *tp) noexcept:
    cdef int mark = tp[0]
    cdef int ci, j, un, last, branch, all_sat, lit, v, val
    if not _propagate(s, trail, tp):
        while tp[0] > mark:
            tp[0] -= 1
            s.assign[trail[tp[0]]] = -1
        return 0
    branch = -1
    all_sat = 1
    for ci in range(s.n_clauses):
        if _clause_state(s, ci, &un, &last):
            continue
        all_sat = 0
        for j in range(s.start[ci], s.start[ci + 1]):
            lit = s.lits[j]
            v = (lit if lit > 0 else -lit) - 1
            if s.assign[v] == -1 and (branch == -1 or v < branch):
                branch = v
    if all_sat:
        return 1
    for val in range(2):
        s.assign[branch] = val
        if _search(s, trail, tp):
            return 1
    s.assign[branch] = -1
    while tp[0] > mark:
        tp[0] -= 1
        s.assign[trail[tp[0]]] = -1
    return 0


def dpll_solve(clauses, int num_vars):
    """DPLL with unit propagation and pure-literal elimination."""
    cdef list cls = [tuple(c) for c in clauses]
    cdef int n_clauses = len(cls)
    cdef int total = 0
    cdef int ci, j, lit
    for ci in range(n_clauses):
        total += len(cls[ci])

    cdef CnfState s
    s.n_clauses = n_clauses
    s.num_vars = num_vars
    s.lits = <int *> malloc(sizeof(int) * (total if total else 1))
    s.start = <int *> malloc(sizeof(int) * (n_clauses + 1))
    s.assign = <int *> malloc(sizeof(int) * (num_vars if num_vars else 1))
    s.seen_pos = <signed char *> malloc(num_vars if num_vars else 1)
    s.seen_neg = <signed char *> malloc(num_vars if num_vars else 1)
    cdef int *trail = <int *> malloc(sizeof(int) * (num_vars if num_vars else 1))
    cdef int tp = 0
    cdef int ok
    try:
        j = 0
        for ci in range(n_clauses):
            s.start[ci] = j
            for lit in cls[ci]:
                s.lits[j] = lit
                j += 1
        s.start[n_clauses] = j
        for j in range(num_vars):
            s.assign[j] = -1
        ok = _search(&s, trail, &tp)
        if not ok:
            return None
        return [0 if s.assign[j] == -1 else s.assign[j] for j in range(num_vars)]
    finally:
        free(s.lits)
        free(s.start)
        free(s.assign)
        free(s.seen_pos)
        free(s.seen_neg)
        free(trail)


def cnf_first_sat(clauses, int num_vars):
    """First satisfying assignment of a CNF in lexicographic order, or -1."""
    if num_vars > 62:
        raise ValueError("kernel mask limit is 62 bits")
    cdef list cls = [tuple(c) for c in clauses]
    cdef int n_clauses = len(cls)
    cdef unsigned long long *pos = <unsigned long long *> malloc(
        sizeof(unsigned long long) * (n_clauses if n_clauses else 1))
    cdef unsigned long long *neg = <unsigned long long *> malloc(
        sizeof(unsigned long long) * (n_clauses if n_clauses else 1))
    cdef unsigned long long full = ((<unsigned long long> 1) << num_vars) - 1
    cdef unsigned long long i, m, limit
    cdef int ci, j, lit, ok
    try:
        for ci in range(n_clauses):
            pos[ci] = 0
            neg[ci] = 0
            for lit in cls[ci]:
                if lit > 0:
                    pos[ci] |= (<unsigned long long> 1) << (lit - 1)
                else:
                    neg[ci] |= (<unsigned long long> 1) << (-lit - 1)
        limit = (<unsigned long long> 1) << num_vars
        i = 0
        while i < limit:
            m = 0
            for j in range(num_vars):
                if (i >> (num_vars - 1 - j)) & 1:
                    m |= (<unsigned long long> 1) << j
            ok = 1
            for ci in range(n_clauses):
                if not (m & pos[ci]) and not (neg[ci] & (~m) & full):
                    ok = 0
                    break
            if ok:
                return <long long> i
            i += 1
        return -1
    finally:
        free(pos)
        free(neg)


cdef int _prog_eval(int *prog, int n, unsigned long long mask, int *stack) noexcept:
    cdef int i = 0, sp = 0, op, a, b, r
    while i < n:
        op = prog[i]
        if op == 0:
            i += 1
            stack[sp] = <int> ((mask >> prog[i]) & 1)
            sp += 1
        elif op == 1:
            stack[sp - 1] ^= 1
        else:
            sp -= 1
            b = stack[sp]
            a = stack[sp - 1]
            if op == 2:
                r = a & b
            elif op == 3:
                r = a | b
            elif op == 4:
                r = a ^ b
            elif op == 5:
                r = (a ^ 1) | b
            else:
                r = (a ^ b) ^ 1
            stack[sp - 1] = r
        i += 1
    return stack[sp - 1]


cdef int *_prog_array(prog, int *n_out) except NULL:
    cdef int n = len(prog)
    cdef int *arr = <int *> malloc(sizeof(int) * (n if n else 1))
    cdef int i
    for i in range(n):
        arr[i] = prog[i]
    n_out[0] = n
    return arr


def prog_eval(prog, mask):
    """Evaluate a postfix formula program under an assignment mask."""
    cdef int n = 0
    cdef int *arr = _prog_array(prog, &n)
    cdef int *stack = <int *> malloc(sizeof(int) * (n if n else 1))
    try:
        return bool(_prog_eval(arr, n, <unsigned long long> mask, stack))
    finally:
        free(arr)
        free(stack)


def prog_first_sat(prog, int num_vars):
    """First satisfying assignment of a formula program in lexicographic
    order, or -1."""
    if num_vars > 62:
        raise ValueError("kernel mask limit is 62 bits")
    cdef int n = 0
    cdef int *arr = _prog_array(prog, &n)
    cdef int *stack = <int *> malloc(sizeof(int) * (n if n else 1))
    cdef unsigned long long i, m, limit
    cdef int j
    try:
        limit = (<unsigned long long> 1) << num_vars
        i = 0
        while i < limit:
            m = 0
            for j in range(num_vars):
                if (i >> (num_vars - 1 - j)) & 1:
                    m |= (<unsigned long long> 1) << j
            if _prog_eval(arr, n, m, stack):
                return <long long> i
            i += 1
        return -1
    finally:
        free(arr)
        free(stack)


def progs_differ(prog_a, prog_b, int num_vars):
    """First assignment mask on which two programs disagree, or -1."""
    if num_vars > 62:
        raise ValueError("kernel mask limit is 62 bits")
    cdef int na = 0, nb = 0
    cdef int *arr_a = _prog_array(prog_a, &na)
    cdef int *arr_b = _prog_array(prog_b, &nb)
    cdef int nmax = na if na > nb else nb
    cdef int *stack = <int *> malloc(sizeof(int) * (nmax if nmax else 1))
    cdef unsigned long long m, limit
    try:
        limit = (<unsigned long long> 1) << num_vars
        m = 0
        while m < limit:
            if _prog_eval(arr_a, na, m, stack) != _prog_eval(arr_b, nb, m, stack):
                return <long long> m
            m += 1
        return -1
    finally:
        free(arr_a)
        free(arr_b)
        free(stack)


cdef unsigned long long _chain(int n_rules, int *body_lits, int *body_start,
                               int *heads, unsigned long long true_mask,
                               unsigned long long false_mask) noexcept:
    cdef unsigned long long facts = true_mask
    cdef unsigned long long bit
    cdef int changed = 1, r, j, lit, fire
    while changed:
        changed = 0
        for r in range(n_rules):
            bit = (<unsigned long long> 1) << heads[r]
            if facts & bit:
                continue
            fire = 0
            for j in range(body_start[r], body_start[r + 1]):
                lit = body_lits[j]
                if lit > 0:
                    if (facts >> (lit - 1)) & 1:
                        fire = 1
                        break
                elif (false_mask >> (-lit - 1)) & 1:
                    fire = 1
                    break
            if fire:
                facts |= bit
                changed = 1
    return facts


cdef struct RuleArrays:
    int *body_lits
    int *body_start
    int *heads
    int n_rules


cdef int _rule_arrays(bodies, heads, RuleArrays *out) except -1:
    cdef int n_rules = len(bodies)
    cdef int total = 0
    cdef int r, j, lit
    for r in range(n_rules):
        total += len(bodies[r])
    out.body_lits = <int *> malloc(sizeof(int) * (total if total else 1))
    out.body_start = <int *> malloc(sizeof(int) * (n_rules + 1))
    out.heads = <int *> malloc(sizeof(int) * (n_rules if n_rules else 1))
    out.n_rules = n_rules
    j = 0
    for r in range(n_rules):
        out.body_start[r] = j
        for lit in bodies[r]:
            out.body_lits[j] = lit
            j += 1
        out.heads[r] = heads[r]
    out.body_start[n_rules] = j
    return 0


def chain_derives(int num_atoms, bodies, heads, true_mask, false_mask, int goal):
    """Forward-chain rules to fixpoint; True when ``goal`` ends up derived."""
    if num_atoms > 62:
        raise ValueError("kernel mask limit is 62 bits")
    cdef RuleArrays ra
    _rule_arrays(bodies, heads, &ra)
    cdef unsigned long long facts
    try:
        facts = _chain(ra.n_rules, ra.body_lits, ra.body_start, ra.heads,
                       <unsigned long long> true_mask,
                       <unsigned long long> false_mask)
        return bool((facts >> goal) & 1)
    finally:
        free(ra.body_lits)
        free(ra.body_start)
        free(ra.heads)


def goal_solution_masks(int num_atoms, bodies, heads, enum_atoms,
                        base_false_mask, int goal):
    """Enumerate truth assignments over ``enum_atoms`` that derive ``goal``."""
    if num_atoms > 62:
        raise ValueError("kernel mask limit is 62 bits")
    cdef int k = len(enum_atoms)
    if k > 62:
        raise ValueError("kernel mask limit is 62 bits")
    cdef RuleArrays ra
    _rule_arrays(bodies, heads, &ra)
    cdef int *enum_idx = <int *> malloc(sizeof(int) * (k if k else 1))
    cdef unsigned long long all_enum = 0, m, limit, tmask, fmask, facts
    cdef unsigned long long base_false = <unsigned long long> base_false_mask
    cdef int i
    cdef list out = []
    try:
        for i in range(k):
            enum_idx[i] = enum_atoms[i]
            all_enum |= (<unsigned long long> 1) << enum_idx[i]
        limit = (<unsigned long long> 1) << k
        m = 0
        while m < limit:
            tmask = 0
            for i in range(k):
                if (m >> i) & 1:
                    tmask |= (<unsigned long long> 1) << enum_idx[i]
            fmask = base_false | (all_enum & ~tmask)
            facts = _chain(ra.n_rules, ra.body_lits, ra.body_start, ra.heads,
                           tmask, fmask)
            if (facts >> goal) & 1:
                out.append(<long long> m)
            m += 1
        return out
    finally:
        free(ra.body_lits)
        free(ra.body_start)
        free(ra.heads)
        free(enum_idx)
