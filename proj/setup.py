import os
import subprocess
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        extdir = os.path.abspath(os.path.dirname(self.get_ext_fullpath(ext.name)))
        source_dir = os.path.abspath(os.path.dirname(__file__))
        build_dir = os.path.join(self.build_temp, "cmake")
        os.makedirs(build_dir, exist_ok=True)
        subprocess.check_call(
            [
                "cmake",
                source_dir,
                "-DSOTEST_BUILD_PYTHON=ON",
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={extdir}",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            cwd=build_dir,
        )
        subprocess.check_call(
            ["cmake", "--build", build_dir, "--target", "_sotest", "-j"],
            cwd=build_dir,
        )


setup(
    ext_modules=[CMakeExtension("sotest._sotest")],
    cmdclass={"build_ext": CMakeBuild},
)
