from setuptools import setup, find_packages

setup(
    name="chabauty-nf",
    version="0.1.0",
    description="Explicit Chabauty and Mordell-Weil sieve for genus 2 curves over number fields",
    author="chabauty-nf contributors",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"chabauty_nf": ["fixtures/*.json"]},
    install_requires=[
        "pandas>=2.0.0",
        "numpy>=1.24.0",
        "sympy>=1.12",
    ],
    extras_require={
        "test": ["pytest>=7.4.0"],
    },
    entry_points={
        "console_scripts": [
            "chabauty-nf=chabauty_nf.cli:main",
        ],
    },
    python_requires=">=3.9",
)
