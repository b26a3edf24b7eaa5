# This file is part of pyCascade.
# Copyright (C) 2024 The pyCascade developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""Expression trees over the variables ``x`` and ``eta``.

Trees are immutable. They are built either by :func:`pyCascade.expressions.parser.parse` or by the
folding constructors of this module (:func:`add`, :func:`mul`, ...), which fold constant sub-trees and
drop neutral elements so that derivative trees stay manageable.
"""
import math

from abc import ABC, abstractmethod
from typing import Dict, Set, Union

import numpy as np

from pyCascade.utils.exceptions import EvaluationException

VARIABLES = ("x", "eta")
FUNCTIONS = ("sin", "cos", "exp", "sqrt", "log")

ArrayLike = Union[float, np.ndarray]


class Expression(ABC):
    """Node of an expression tree."""

    def evaluate(self, x: ArrayLike = 0.0, eta: ArrayLike = 0.0) -> np.ndarray:
        """
        Evaluates the expression at the broadcast of ``x`` and ``eta``.

        :raises EvaluationException: if the expression is not defined at one of the points or the result is not
            finite.
        """
        env = {"x": np.asarray(x, dtype=float), "eta": np.asarray(eta, dtype=float)}
        shape = np.broadcast(env["x"], env["eta"]).shape
        with np.errstate(all="ignore"):
            result = np.asarray(self._eval(env), dtype=float)
        if not np.all(np.isfinite(result)):
            raise EvaluationException("expression '{}' is not finite at the given points".format(self))
        return np.array(np.broadcast_to(result, shape))

    def __call__(self, x: ArrayLike = 0.0, eta: ArrayLike = 0.0) -> np.ndarray:
        return self.evaluate(x, eta)

    @abstractmethod
    def _eval(self, env: Dict[str, np.ndarray]):
        pass

    @abstractmethod
    def differentiate(self, var: str) -> "Expression":
        """Exact symbolic derivative with respect to ``var``."""

    @abstractmethod
    def variables(self) -> Set[str]:
        pass

    def depends_on(self, var: str) -> bool:
        return var in self.variables()

    def is_zero(self) -> bool:
        return False

    def is_constant(self) -> bool:
        return not self.variables()

    def __repr__(self):
        return "{}('{}')".format(type(self).__name__, self)


class Const(Expression):
    def __init__(self, value: float, name: str = None):
        self.value = float(value)
        self.name = name

    def _eval(self, env):
        return self.value

    def differentiate(self, var: str) -> Expression:
        return ZERO

    def variables(self) -> Set[str]:
        return set()

    def is_zero(self) -> bool:
        return self.value == 0.0

    def __str__(self):
        if self.name is not None:
            return self.name
        text = repr(self.value)
        if self.value < 0 or text.startswith("-"):
            return "(" + text + ")"
        return text


class Var(Expression):
    def __init__(self, name: str):
        if name not in VARIABLES:
            raise ValueError("unknown variable " + name)
        self.name = name

    def _eval(self, env):
        return env[self.name]

    def differentiate(self, var: str) -> Expression:
        return ONE if var == self.name else ZERO

    def variables(self) -> Set[str]:
        return {self.name}

    def __str__(self):
        return self.name


class Neg(Expression):
    def __init__(self, operand: Expression):
        self.operand = operand

    def _eval(self, env):
        return -self.operand._eval(env)

    def differentiate(self, var: str) -> Expression:
        return neg(self.operand.differentiate(var))

    def variables(self) -> Set[str]:
        return self.operand.variables()

    def __str__(self):
        return "(-{})".format(self.operand)


class BinOp(Expression):
    def __init__(self, op: str, left: Expression, right: Expression):
        if op not in "+-*/^":
            raise ValueError("unknown operator " + op)
        self.op = op
        self.left = left
        self.right = right

    def _eval(self, env):
        a = self.left._eval(env)
        b = self.right._eval(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            if np.any(np.asarray(b) == 0.0):
                raise EvaluationException("division by zero in '{}'".format(self))
            return a / b
        return np.power(a, b)

    def differentiate(self, var: str) -> Expression:
        da = self.left.differentiate(var)
        db = self.right.differentiate(var)
        if self.op == "+":
            return add(da, db)
        if self.op == "-":
            return sub(da, db)
        if self.op == "*":
            return add(mul(da, self.right), mul(self.left, db))
        if self.op == "/":
            return div(sub(mul(da, self.right), mul(self.left, db)), power(self.right, Const(2.0)))
        # a^b
        if db.is_zero():
            return mul(mul(self.right, power(self.left, sub(self.right, ONE))), da)
        return mul(self, add(mul(db, func("log", self.left)), div(mul(self.right, da), self.left)))

    def variables(self) -> Set[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return "({} {} {})".format(self.left, self.op, self.right)


class Func(Expression):
    def __init__(self, name: str, argument: Expression):
        if name not in FUNCTIONS:
            raise ValueError("unknown function " + name)
        self.name = name
        self.argument = argument

    def _eval(self, env):
        a = self.argument._eval(env)
        if self.name == "sin":
            return np.sin(a)
        if self.name == "cos":
            return np.cos(a)
        if self.name == "exp":
            return np.exp(a)
        if self.name == "sqrt":
            if np.any(np.asarray(a) < 0.0):
                raise EvaluationException("sqrt of a negative value in '{}'".format(self))
            return np.sqrt(a)
        if np.any(np.asarray(a) <= 0.0):
            raise EvaluationException("log of a non-positive value in '{}'".format(self))
        return np.log(a)

    def differentiate(self, var: str) -> Expression:
        inner = self.argument.differentiate(var)
        if inner.is_zero():
            return ZERO
        if self.name == "sin":
            outer = func("cos", self.argument)
        elif self.name == "cos":
            outer = neg(func("sin", self.argument))
        elif self.name == "exp":
            outer = self
        elif self.name == "sqrt":
            outer = div(ONE, mul(Const(2.0), self))
        else:
            outer = div(ONE, self.argument)
        return mul(outer, inner)

    def variables(self) -> Set[str]:
        return self.argument.variables()

    def __str__(self):
        return "{}({})".format(self.name, self.argument)


ZERO = Const(0.0)
ONE = Const(1.0)
PI = Const(math.pi, name="pi")


def _fold(node: Expression) -> Expression:
    # Constant sub-trees collapse to a literal unless that would hide an evaluation error.
    if node.is_constant() and not isinstance(node, Const):
        try:
            value = float(node.evaluate())
        except EvaluationException:
            return node
        return Const(value)
    return node


def neg(a: Expression) -> Expression:
    if isinstance(a, Neg):
        return a.operand
    return _fold(Neg(a))


def add(a: Expression, b: Expression) -> Expression:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    return _fold(BinOp("+", a, b))


def sub(a: Expression, b: Expression) -> Expression:
    if b.is_zero():
        return a
    if a.is_zero():
        return neg(b)
    return _fold(BinOp("-", a, b))


def mul(a: Expression, b: Expression) -> Expression:
    if a.is_zero() or b.is_zero():
        return ZERO
    if isinstance(a, Const) and a.value == 1.0:
        return b
    if isinstance(b, Const) and b.value == 1.0:
        return a
    return _fold(BinOp("*", a, b))


def div(a: Expression, b: Expression) -> Expression:
    if isinstance(b, Const) and b.value == 1.0:
        return a
    return _fold(BinOp("/", a, b))


def power(a: Expression, b: Expression) -> Expression:
    if isinstance(b, Const) and b.value == 1.0:
        return a
    if b.is_zero():
        return ONE
    return _fold(BinOp("^", a, b))


def func(name: str, argument: Expression) -> Expression:
    return _fold(Func(name, argument))


def constant(value: float) -> Const:
    return Const(value)


def differentiate(e: Expression, var: str, order: int = 1) -> Expression:
    """Repeated symbolic derivative of ``e`` with respect to ``var``."""
    if var not in VARIABLES:
        raise ValueError("can only differentiate with respect to one of " + ", ".join(VARIABLES))
    result = e
    for _ in range(order):
        result = result.differentiate(var)
    return result
