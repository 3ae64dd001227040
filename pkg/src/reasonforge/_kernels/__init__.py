"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python fallback is
always available. Set ``REASONFORGE_PURE=1`` to force the fallback (useful for
the parity tests and the benchmark).
"""

import os

from . import pure

try:
    from . import _speedups
except ImportError:
    _speedups = None

if os.environ.get("REASONFORGE_PURE") == "1" or _speedups is None:
    _impl = pure
    IMPLEMENTATION = "pure"
else:
    _impl = _speedups
    IMPLEMENTATION = "compiled"

OP_VAR = pure.OP_VAR
OP_NOT = pure.OP_NOT
OP_AND = pure.OP_AND
OP_OR = pure.OP_OR
OP_XOR = pure.OP_XOR
OP_IMPLIES = pure.OP_IMPLIES
OP_IFF = pure.OP_IFF

dpll_solve = _impl.dpll_solve
cnf_first_sat = _impl.cnf_first_sat
prog_eval = _impl.prog_eval
prog_first_sat = _impl.prog_first_sat
progs_differ = _impl.progs_differ
chain_derives = _impl.chain_derives
goal_solution_masks = _impl.goal_solution_masks

__all__ = [
    "IMPLEMENTATION",
    "dpll_solve",
    "cnf_first_sat",
    "prog_eval",
    "prog_first_sat",
    "progs_differ",
    "chain_derives",
    "goal_solution_masks",
]
