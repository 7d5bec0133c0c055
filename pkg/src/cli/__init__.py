"""Command-line layer: file format, reports, generators and commands."""
