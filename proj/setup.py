import os
from pathlib import Path

from pybind11.setup_helpers import ParallelCompile, Pybind11Extension, build_ext
from setuptools import setup

ROOT = Path(__file__).parent

# setuptools requires sources as /-separated paths relative to this file.
CORE_SOURCES = sorted(p.relative_to(ROOT).as_posix() for p in (ROOT / "src").glob("*.cpp"))


def eigen_include():
    for candidate in (
        os.environ.get("EIGEN3_INCLUDE_DIR"),
        "/usr/include/eigen3",
        "/usr/local/include/eigen3",
    ):
        if candidate and Path(candidate, "Eigen").is_dir():
            return candidate
    raise RuntimeError("Eigen3 headers not found; set EIGEN3_INCLUDE_DIR")


ParallelCompile("FBNN_NUM_BUILD_JOBS").install()

setup(
    ext_modules=[
        Pybind11Extension(
            "fbnn._core",
            ["bindings/fbnn_module.cpp", *CORE_SOURCES],
            include_dirs=[str(ROOT / "include"), str(ROOT / "vendor"), eigen_include()],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
