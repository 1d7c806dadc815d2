"""Build hook: compile the optional Cython kernel backend when possible.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure here degrades to a pure-Python
install instead of aborting.
"""

from setuptools import setup

ext_modules = []
include_dirs = []
try:
    import numpy
    from Cython.Build import cythonize

    include_dirs = [numpy.get_include()]
    ext_modules = cythonize(
        ["src/simdmem/kernels/_cyops.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"simdmem: building without compiled kernels ({exc})")

setup(
    ext_modules=ext_modules,
    include_dirs=include_dirs,
)
