"""
Command-line application around the relaxation simulator: settings,
scenario files, CSV and text reports.
"""
