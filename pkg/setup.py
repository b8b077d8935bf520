# python setup.py build_ext --inplace
import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; macc2d.kernels falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("macc2d._search_ext", ["src/macc2d/_search_ext.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

if os.environ.get("MACC2D_PURE_PYTHON"):
    ext_modules = []

setup(ext_modules=ext_modules)
