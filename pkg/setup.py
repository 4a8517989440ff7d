"""Build script for the optional compiled scan kernels.

The package is fully functional without the extension: fitscape._kernels
falls back to the vectorized NumPy backend when the compiled module is
missing, so a failed build must never fail the install.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fitscape._kernels._scan",
                ["src/fitscape/_kernels/_scan.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
