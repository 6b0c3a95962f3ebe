from setuptools import find_packages, setup


with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="rctrack",
    version="0.1.0",
    description="Reservoir-computing inverse-model tracking control of a two-link robot arm",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["main"],
    install_requires=[
        "pydantic~=2.10.4",
        "tenacity~=9.0.0",
        "loguru~=0.7.3",
        "numpy>=1.26,<3",
        "scipy~=1.14",
        "pandas~=2.2",
        "matplotlib~=3.9",
        "tomli-w~=1.0.0",
        'tomli>=1.1; python_version < "3.11"',
    ],
    extras_require={
        "test": ["pytest~=8.3.5", "pytest-asyncio~=0.25.3"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.12",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "rctrack=main:main",
        ],
    },
)
