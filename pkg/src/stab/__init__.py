"""Soft type assignment with booleans: terms, types, derivations, machines, ATM compilation."""
