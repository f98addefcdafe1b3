"""Explicit Chabauty over number fields with a Mordell-Weil sieve, for genus 2 curves"""
__version__ = "0.1.0"
