"""Exact workbench for graphs of groups, Bruhat-Tits trees and Mumford curve automorphisms."""

__version__ = "0.1.0"
