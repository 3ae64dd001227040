"""reasonforge: symbolic reasoning task generation, sampling, and grading.

Three task families with machine-verified gold answers (deduction/SAT,
induction/sequences, abduction/rule trace-back), a chat-API trajectory
sampler, and structured graders, wired together by the ``reasonforge`` CLI.
"""

from ._kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION

__version__ = "0.1.0"

__all__ = ["KERNEL_IMPLEMENTATION", "__version__"]
