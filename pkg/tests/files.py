"""Writing inputs for CLI runs."""

import json

from infmat import serialize as ser


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def matrix(path, m):
    return write(path, ser.matrix_to_json(m))


def derivation_table(path, t):
    return write(path, ser.derivation_table_to_json(t))


def automorphism_table(path, t):
    return write(path, ser.automorphism_table_to_json(t))


def basis(path, field, mats):
    return write(path, ser.basis_to_json(field, mats))
