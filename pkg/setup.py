"""Build the optional compiled transport kernel.

The package is fully functional without it (a pure-Python kernel is selected
at import time); building just makes the numeric monodromy fast.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("k3pf._kernels", ["src/k3pf/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
