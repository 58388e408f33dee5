"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension; monostab.kernels
falls back to the numpy implementation when the compiled module is absent.
"""

from setuptools import Extension, setup


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        import warnings

        warnings.warn(
            "cython/numpy unavailable at build time; "
            "installing monostab with the pure-numpy kernel backend only"
        )
        return []
    return cythonize(
        [
            Extension(
                "monostab.kernels._core",
                ["src/monostab/kernels/_core.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions())
