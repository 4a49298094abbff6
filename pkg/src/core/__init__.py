"""Numerical engine: coefficient sequences, operators, spectra, Szegő integrals and Prüfer counts"""
