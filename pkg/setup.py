"""Builds the optional compiled oracle kernel; the package works without it."""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("plqconj._oracle_kernel", ["src/plqconj/_oracle_kernel.pyx"], include_dirs=[numpy.get_include()])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
