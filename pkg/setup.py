import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "trigcell._kernels.llf_cython",
                ["src/trigcell/_kernels/llf_cython.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # pure-Python install; the numpy kernel backend is used instead
    ext_modules = []

setup(ext_modules=ext_modules)
