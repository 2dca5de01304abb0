"""Build script for the optional compiled detector core.

The package is fully functional without the extension: the message-passing
detector falls back to a vectorized numpy implementation selected at import
time (see daftsim._kernels).  Building the extension just makes the hot
per-edge update loop faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "daftsim._kernels._core",
                ["src/daftsim/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
