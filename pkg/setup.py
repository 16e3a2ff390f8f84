from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: install the numpy backend only
    extensions = []
else:
    extensions = cythonize(
        [Extension("qhomology.statevec._kernels", ["src/qhomology/statevec/_kernels.pyx"],
                   extra_compile_args=["-O3"], optional=True)],
        language_level=3,
    )

setup(ext_modules=extensions)
