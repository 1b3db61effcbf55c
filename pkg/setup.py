import os

import numpy as np
from setuptools import Extension, setup

# MEDOID_LP_PURE=1 at build time skips the extension; the package then runs
# on the numpy fallback kernels.
ext_modules = []
if os.environ.get("MEDOID_LP_PURE", "") not in ("1", "true", "yes"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "medoid_lp._ckernels",
                ["src/medoid_lp/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
