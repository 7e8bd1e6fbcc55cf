#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################


class ShapeMismatchError(ValueError):
    """When operand shapes are incompatible for a primitive.

    Parameters
    ----------
    kind: str
        Name of the primitive (op-kind) rejecting the operands.
    shapes: tuple
        Shapes of the offending operands.
    message: str
        Overwrites default message.
    """

    def __init__(self, kind, *shapes, message=None):
        if message is None:
            listed = " and ".join(str(tuple(s)) for s in shapes)
            message = f"Incompatible shapes for '{kind}': {listed}."
        self.kind = kind
        self.shapes = shapes
        self.message = message
        super().__init__(self.message)


class NonFiniteError(FloatingPointError):
    """When a primitive receives or produces NaN or infinite values.

    Parameters
    ----------
    kind: str
        Name of the primitive (op-kind).
    where: str
        Which operand or result is non-finite.
    message: str
        Overwrites default message.
    """

    def __init__(self, kind, where="input", message=None):
        if message is None:
            message = f"Non-finite {where} for '{kind}'."
        self.kind = kind
        self.message = message
        super().__init__(self.message)


class NumericalError(RuntimeError):
    """When training produces a non-finite loss.

    Parameters
    ----------
    epoch: int
        Epoch during which the failure happened.
    batch: int
        Index of the last batch processed.
    losses: dict
        Loss values of the failing batch.
    message: str
        Overwrites default message.
    """

    def __init__(self, epoch, batch, losses, message=None):
        if message is None:
            shown = ", ".join(f"{k}={v!r}" for k, v in losses.items())
            message = f"Non-finite loss in epoch {epoch}, batch {batch}: {shown}."
        self.epoch = epoch
        self.batch = batch
        self.losses = dict(losses)
        self.message = message
        super().__init__(self.message)


class CheckpointMismatchError(ValueError):
    """When a checkpoint does not match the task it is asked to run.

    Parameters
    ----------
    field: str
        Name of the mismatching quantity.
    expected
        Value required by the task.
    found
        Value stored in the checkpoint.
    message: str
        Overwrites default message.
    """

    def __init__(self, field, expected, found, message=None):
        if message is None:
            message = f"Checkpoint mismatch on '{field}': task needs {expected}, checkpoint has {found}."
        self.message = message
        super().__init__(self.message)


class UnsupportedTypeError(Exception):
    """For file types not supported by our writers and readers.

    Parameters
    ----------
    file
        Name of file triggering the error.
    supported_types: list
        Supported file types.
    message: str
        Overwrites default message.
    """

    def __init__(self, file, supported_types=None, message=None):
        if message is None:
            message = f"The file {file} is not supported."
            if supported_types:
                message = message[:-1] + ". Supported file types include: " + ", ".join(supported_types) + "."
        self.message = message
        super().__init__(self.message)
