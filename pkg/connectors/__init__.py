"""Connectors package for .qp sources, matrices and sample exports"""
