"""Build script: compiles the optional speedup extension when Cython is available.

The package works without the extension (a pure-Python backend is selected at
import time), so a failed or skipped compilation must never break the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "reasonforge._kernels._speedups",
                ["src/reasonforge/_kernels/_speedups.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
