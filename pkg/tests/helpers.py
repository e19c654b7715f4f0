import numpy as np

from multient.statespace import make_state

TEST_DIMS = [(2, 2), (2, 2, 2), (2, 3, 2), (2, 2, 2, 2)]


def random_product(dims, rng, blocks=None):
    """Random state that is a product over ``blocks`` (default: every part)."""
    blocks = blocks or [[i] for i in range(len(dims))]
    tensor = np.array(1.0 + 0j)
    order = []
    for block in blocks:
        size = int(np.prod([dims[i] for i in block]))
        v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        tensor = np.multiply.outer(tensor, v.reshape([dims[i] for i in block]))
        order.extend(block)
    tensor = np.transpose(tensor, np.argsort(order))
    return make_state(dims, tensor, normalize=True)
