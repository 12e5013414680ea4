"""Build script: compiles the optional GF(p) elimination kernel.

The package works without the extension (a pure-Python backend is selected
at import time), so a failed compile only costs speed. Set PARTHOM_NO_EXT=1
to skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("PARTHOM_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/parthom/_reduction.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
