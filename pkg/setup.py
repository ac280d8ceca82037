from setuptools import setup, find_packages

setup(
    name="maxbpd",
    version="1.0.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "pyyaml>=6.0",
        "pillow>=9.0.0",
        "numpy>=1.24",
        "sympy>=1.12",
        "drawsvg>=2.0",
    ],
    entry_points={
        "console_scripts": [
            "maxbpd=maxbpd.__main__:main",
        ],
    },
    description="Maximal marked bumpless pipedreams and a brute-force verification oracle",
    python_requires=">=3.8",
)
