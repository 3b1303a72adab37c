"""Parsers for the .qp text language"""
