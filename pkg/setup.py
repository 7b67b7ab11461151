import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "pt_spectra.eigensolver._kernels",
        ["src/pt_spectra/eigensolver/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=[
            "-O3",
            "-march=native",
            "-fno-math-errno",
            # complex multiplies inline (entries are pre-checked finite, so
            # the NaN-recovery slow path of __muldc3 buys nothing)
            "-fcx-limited-range",
        ],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

if cythonize is not None:
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    # Without Cython the package still installs; the solver falls back to
    # the pure-numpy backend at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
