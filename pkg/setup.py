"""
Setup script for KMBQKD.
"""
from setuptools import setup, find_packages
from pathlib import Path

# Read README
readme_path = Path(__file__).parent / "README.md"
long_description = readme_path.read_text(encoding="utf-8") if readme_path.exists() else ""

# Read requirements
requirements_path = Path(__file__).parent / "requirements.txt"
requirements = []
if requirements_path.exists():
    with open(requirements_path, 'r', encoding='utf-8') as f:
        requirements = [
            line.strip() for line in f
            if line.strip() and not line.startswith('#') and not line.startswith('pytest')
        ]

setup(
    name="kmbqkd",
    version="1.0.0",
    description="Error rates, eavesdropping sweeps and Monte Carlo sessions for the KMB09 QKD protocol",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="KMBQKD Team",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["main"],
    include_package_data=True,
    install_requires=requirements,
    extras_require={
        "test": ["pytest>=7.4.0", "pytest-cov>=4.1.0"],
    },
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Security :: Cryptography",
    ],
    keywords="quantum key distribution, kmb09, qber, intercept-resend, monte carlo",
    entry_points={
        "console_scripts": [
            "kmbqkd=main:main",
        ],
    },
)
