"""Init file for tests"""
