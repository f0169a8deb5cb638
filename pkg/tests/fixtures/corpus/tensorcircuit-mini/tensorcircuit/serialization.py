import ast

import torch
import yaml


def load_model(path):
    model = torch.load(path)
    return model


def load_model_safe(path):
    model = torch.load(path, weights_only=True)
    return model


def load_config(text):
    return yaml.load(text)


def load_config_safe(text):
    return yaml.safe_load(text)


def evaluate_expression(expr):
    return eval(expr)


def evaluate_literal(expr):
    return ast.literal_eval(expr)
