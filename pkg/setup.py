"""Build script: compiles the optional fast kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile only costs speed.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "gcb._kernels._fast",
                sources=["src/gcb/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[numpy.get_include()],
)
