"""Build the optional compiled kernel; the package works without it."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("seifert_wrt._kernels._ckernel", ["src/seifert_wrt/_kernels/_ckernel.pyx"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
