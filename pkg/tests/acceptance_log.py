"""Verdict lines collected by the acceptance suite and printed in the terminal summary."""

LINES: dict = {}
