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

"""Grammar of the expression language (see ``docs/grammar.md``).

Standard infix notation with the usual precedence: ``^`` binds tighter than unary sign, which binds
tighter than ``*`` and ``/``, which bind tighter than binary ``+`` and ``-``. ``^`` is right-associative.
"""
from pyparsing import (Forward, OpAssoc, ParseBaseException, ParseFatalException, ParserElement, Regex, Suppress,
                       Word, alphanums, alphas, infix_notation, one_of)

from pyCascade.expressions.expression import (Expression, FUNCTIONS, PI, VARIABLES, Const, Var, add, div, func, mul,
                                              neg, power, sub)
from pyCascade.utils.exceptions import ExpressionSyntaxException

ParserElement.enable_packrat()

_BINARY = {"+": add, "-": sub, "*": mul, "/": div}


def _number_action(tokens):
    return Const(float(tokens[0]))


def _identifier_action(s, loc, tokens):
    name = tokens[0]
    if name in VARIABLES:
        return Var(name)
    if name == "pi":
        return PI
    raise ParseFatalException(s, loc, "unknown identifier '{}'".format(name))


def _call_action(s, loc, tokens):
    name, argument = tokens[0], tokens[1]
    if name not in FUNCTIONS:
        raise ParseFatalException(s, loc, "unknown function '{}'".format(name))
    return func(name, argument)


def _power_action(tokens):
    operands = tokens[0][::2]
    result = operands[-1]
    for base in reversed(operands[:-1]):
        result = power(base, result)
    return result


def _sign_action(tokens):
    group = list(tokens[0])
    result = group[-1]
    for sign in reversed(group[:-1]):
        if sign == "-":
            result = neg(result)
    return result


def _binary_action(tokens):
    group = tokens[0]
    result = group[0]
    for i in range(1, len(group), 2):
        result = _BINARY[group[i]](result, group[i + 1])
    return result


def _create_grammar() -> ParserElement:
    number = Regex(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?").set_parse_action(_number_action)
    name = Word(alphas, alphanums + "_")

    expr = Forward()

    call = (name + Suppress("(") + expr + Suppress(")")).set_parse_action(_call_action)
    identifier = name.copy().set_parse_action(_identifier_action)
    operand = number | call | identifier

    expr <<= infix_notation(operand, [
        ("^", 2, OpAssoc.RIGHT, _power_action),
        (one_of("+ -"), 1, OpAssoc.RIGHT, _sign_action),
        (one_of("* /"), 2, OpAssoc.LEFT, _binary_action),
        (one_of("+ -"), 2, OpAssoc.LEFT, _binary_action),
    ])
    return expr


_GRAMMAR = _create_grammar()


def parse(text: str) -> Expression:
    """
    Parses an expression over ``x`` and ``eta``.

    :raises ExpressionSyntaxException: on malformed input or unknown identifiers; ``position`` holds the
        offending character offset.
    """
    if text is None or not str(text).strip():
        raise ExpressionSyntaxException("empty expression", position=0)
    try:
        result = _GRAMMAR.parse_string(str(text), parse_all=True)
    except ParseBaseException as e:
        raise ExpressionSyntaxException("syntax error at position {}: {}".format(e.loc, e.msg),
                                        position=e.loc) from e
    return result[0]
