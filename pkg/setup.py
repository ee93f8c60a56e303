import os
from setuptools import setup


VERSION = "0.1.0"


with open(os.path.join("nctest", "README.md"), "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name='nctest',
    version=VERSION,
    description='Decide whether a prepare-measure scenario admits a noncontextual ontological model.',
    long_description=long_description,
    long_description_content_type="text/markdown",
    license='Public Domain',
    packages=[
        'nctest',
    ],
    install_requires=[
        req for req in open('requirements.txt').read().split('\n') if len(req) > 0
    ],
    package_data={
        # Make sure mypy sees us as typed.
        "nctest": ["py.typed", "README.md"],
    },
    scripts=[
        'scripts/nctest_cli.py',
    ],
    python_requires=">=3.6",
)
