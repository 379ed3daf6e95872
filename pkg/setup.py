from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or a working compiler)
# the package installs pure-Python and mvgamma.kernels falls back at import.
try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "mvgamma.kernels._core",
                ["src/mvgamma/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
