"""Tests of python_jde_fusion"""
