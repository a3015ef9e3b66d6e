"""Builds the optional compiled kernel extension.

The package works without it (pure-numpy fallback); the extension
accelerates the simplex and blocking-pair kernels in the solver's inner
loop.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "lendmatch._kernels",
        ["src/lendmatch/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
