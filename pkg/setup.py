"""
Build script for setuptools if needed
"""
from setuptools import setup

if __name__ == "__main__":
    setup()
