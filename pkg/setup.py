from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    USE_CYTHON = True
except ImportError:
    USE_CYTHON = False

# without Cython the package still installs and runs on the pure-Python kernel
if USE_CYTHON:
    extensions = cythonize(
        [Extension("heliobubble._kernels", ["src/heliobubble/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
else:
    extensions = []

setup(ext_modules=extensions)
