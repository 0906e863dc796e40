"""Build script: compiles the optional STP kernel extension.

The package works without the extension (a numpy fallback is selected at
import time); set ABDUCE_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ABDUCE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "abduce.stpn._kernel_cy",
                    ["src/abduce/stpn/_kernel_cy.pyx"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
