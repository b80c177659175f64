"""Build script for the compiled search kernel.

The extension is optional: when it cannot be built, the package falls back
to the pure-Python kernel at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: install without the extension
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "modcheck.solver._ckernel",
                sources=["src/modcheck/solver/_ckernel.pyx", "src/modcheck/solver/kernel.cpp"],
                include_dirs=["src/modcheck/solver"],
                language="c++",
                extra_compile_args=["-O2", "-std=c++17"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
