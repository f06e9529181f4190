"""Core electromagnetics, rate model, optimizer and experiment plumbing"""
