"""Build hook for the optional compiled kernel extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); the build therefore tolerates a missing compiler
or Cython toolchain.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lanecast._kernels",
                ["src/lanecast/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
