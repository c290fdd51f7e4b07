""" To make this repo a module """
