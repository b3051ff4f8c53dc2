"""Builds the optional Cython NL-means kernel.

python setup.py build_ext --inplace

If Cython or a compiler is missing the package still installs and
``rclbp.nlmeans`` uses its numpy fallback.
"""

import numpy as np
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
                "rclbp._nlmeans_ext",
                ["src/rclbp/_nlmeans_ext.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
