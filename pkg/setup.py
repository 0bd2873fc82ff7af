import sys

from setuptools import Extension, setup

# The compiled kernel is an optimization: if Cython or a C compiler is not
# available the install still succeeds and pvcurt falls back to the pure-Python
# kernels at import time.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pvcurt._core._ckernels",
                ["src/pvcurt/_core/_ckernels.pyx"],
                # -ffp-contract=off keeps the compiled kernels bit-identical to
                # the pure-Python fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    print(f"pvcurt: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
