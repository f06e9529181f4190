"""Setup configuration for the CAP-MIMO pattern design library"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="capmimo",
    version="0.1.0",
    author="CAP-MIMO Team",
    description="Pattern-division multiplexing simulator for continuous-aperture MIMO transmitters",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"capmimo": ["scenarios/*.toml"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.10",  # tomllib, or tomli backport on 3.10
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",  # For environment variables
        "tomli-w>=1.0.0",        # Scenario serialization
        "tomli>=1.1.0; python_version < '3.11'",  # tomllib backport
    ],
    extras_require={
        "dev": ["pytest>=7.0.0", "pytest-cov>=4.0.0", "black>=23.0.0", "ruff>=0.1.0"],
    },
    entry_points={
        "console_scripts": ["capmimo=capmimo.cli:main"],
    },
)
