"""Build hook for the compiled codec core.

The package works without the extension (a pure-Python codec is selected at
import time); set SPMS_SKIP_CYTHON=1 to install without a C toolchain.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("SPMS_SKIP_CYTHON"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("spms.broker._codec_cy", ["src/spms/broker/_codec_cy.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
