"""Test suite for the CAP-MIMO pattern design library"""
