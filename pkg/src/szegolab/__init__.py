"""Numerical checks of Szego-Widom type limit theorems for block Toeplitz determinants."""
