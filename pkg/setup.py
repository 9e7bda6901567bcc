from setuptools import setup, find_packages

setup(
    name="mixmatch",
    version="0.1.0",
    packages=find_packages(include=["tensorcore", "networks", "translation", "scenes", "evaluation"]),
    py_modules=["mixmatch_cli"],
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "matplotlib",
        "PyYAML",
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
        "typing": ["pandas-stubs", "types-pytz"],
    },
    entry_points={
        "console_scripts": [
            "mixmatch=mixmatch_cli:main",
        ],
    },
    package_data={
        "": ["*.yaml"],
    },
    include_package_data=True,
    description="Mix-and-match encoder/decoder networks for zero-pair cross-modal translation",
)
