from setuptools import setup, find_packages

setup(
    name='farfield',
    version='0.1.0',
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    package_data={'farfield.app': ['templates/*.j2']},
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.26',
        'scipy>=1.11',
        'pandas>=2.2',
        'pydantic>=2.7',
        'python-dotenv>=1.0',
        'python-json-logger>=3.3',
        'joblib>=1.3',
        'matplotlib>=3.8',
        'jinja2>=3.1',
        'soundfile>=0.12',
    ],
    entry_points={
        'console_scripts': ['farfield=farfield.app.cli:main'],
    },
)
