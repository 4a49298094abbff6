"""Dialog windows"""
