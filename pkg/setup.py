from setuptools import setup, find_packages

setup(
    name="nanosphere-csl",
    version="0.1",
    packages=find_packages(include=['nanosphere_csl', 'nanosphere_csl.*']),
    include_package_data=True,
    install_requires=[
        'numpy>=1.24',
        'scipy>=1.10',
        'pandas>=1.5',
        'PyYAML>=6.0.1',
        'markdown2>=2.4.10',
        'jsonschema>=4.21.1',
        'tqdm>=4.66.2',
        'python-dotenv>=1.0.0',
    ],
    extras_require={
        'test': ['pytest>=7.0'],
    },
    entry_points={
        'console_scripts': [
            'nanosphere-csl = nanosphere_csl.cli:main',
        ],
    },
    python_requires='>=3.8',
)
