"""Build script: compiles the optional selection-kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time); set CROWDMARKET_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CROWDMARKET_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "crowdmarket._kernels._ckernels",
                    ["src/crowdmarket/_kernels/_ckernels.pyx"],
                    # fp-contract off: FMA fusing would change PSO rounding vs CPython
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
