import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

EXTENSIONS = ["scheduler", "rng", "sampling", "fullscan", "localgraph"]

setup(
    ext_modules=cythonize(
        [
            Extension(
                f"ppsim.{name}",
                [f"src/ppsim/{name}.pyx"],
                language="c++",
                include_dirs=[np.get_include(), "src/ppsim"],
                extra_compile_args=["-O2", "-std=c++14"],
            )
            for name in EXTENSIONS
        ],
        language_level=3,
        include_path=["src"],
    ),
)
