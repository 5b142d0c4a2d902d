import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/depthtower/kernel/_native.pyx",
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # the package falls back to the pure-python kernel at import time
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[np.get_include()],
)
