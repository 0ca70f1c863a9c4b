from setuptools import find_packages, setup

setup(
    name="event_geoloc",
    version="0.1.0",
    description="Social event detection in hyperbolic space and toponym-hierarchy geolocation",
    long_description=open("README.md").read(),
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    package_data={"event_geoloc": ["data/*.jsonl"]},
    install_requires=[
        "numpy>=1.26.4",
        "scipy>=1.11.0",
        "scikit-learn>=1.3.0",
        "pydantic>=2.5.0",
        "tenacity>=8.3.0",
        "termcolor>=2.4.0",
        "requests>=2.31.0",
        "geopy>=2.4.0",
        "geojson>=3.0.0",
    ],
    extras_require={
        "test": ["pytest>=7.4.0"],
    },
    entry_points={
        "console_scripts": ["event-geoloc=event_geoloc.cli:main"],
    },
)
