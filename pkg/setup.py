"""Build script: compiles the optional evaluation kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "sinevolve.kernels._core",
                ["src/sinevolve/kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
