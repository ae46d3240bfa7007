"""
Dephasing Non-Markovianity & Regression Toolkit - Main Application
Command-line entry point: `python app.py <measures|qrt|photonic|oracle|check> [options]`.
"""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
