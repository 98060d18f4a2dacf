"""
Image and mask files

PNG (8 or 16 bit, sRGB encoded) for interchange, decoded to linear light on
load and encoded on save.  PFM (little-endian, scale -1.0, float32) for masks
and intermediates, loaded and saved bit-exactly.
"""
from os.path import exists

import cv2
import numpy as np

from shadowpy.common.errors import DataError
from shadowpy.common.utils import atomic_write_bytes
from shadowpy.imgcore.image import as_image, linear_to_srgb, srgb_to_linear


def load_png(path):
    """
    Loads an 8 or 16 bit PNG as a linear-light ImageBuf

    Gray images are replicated to RGB, alpha is dropped.
    """
    if not exists(path):
        raise FileNotFoundError('Image not found: {}'.format(path))

    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise DataError('Could not load image: {}'.format(path))

    if img.dtype == np.uint8:
        scale = 255.0
    elif img.dtype == np.uint16:
        scale = 65535.0
    else:
        raise DataError('{} has unsupported sample type {}'.format(path, img.dtype))

    if img.ndim == 2:
        img = cv2.cvtColor(img, cv2.COLOR_GRAY2RGB)
    elif img.shape[2] == 4:
        img = cv2.cvtColor(img, cv2.COLOR_BGRA2RGB)
    else:
        img = cv2.cvtColor(img, cv2.COLOR_BGR2RGB)

    return srgb_to_linear(img.astype(np.float64) / scale)


def encode_png(image, bits=16):
    """ linear ImageBuf -> PNG bytes, clamping to [0, 1] """
    image = as_image(image, max_value=None)
    if bits == 16:
        dtype, scale = np.uint16, 65535.0
    elif bits == 8:
        dtype, scale = np.uint8, 255.0
    else:
        raise ValueError('bits must be 8 or 16, got {}'.format(bits))

    encoded = np.round(linear_to_srgb(image) * scale).astype(dtype)
    ok, buf = cv2.imencode('.png', cv2.cvtColor(encoded, cv2.COLOR_RGB2BGR))
    if not ok:
        raise DataError('PNG encoding failed')
    return buf.tobytes()


def save_png(image, path, bits=16):
    atomic_write_bytes(path, encode_png(image, bits=bits))


def load_gray_png(path):
    """ raw [0, 1] coverage of a single-channel PNG, no colour decoding """
    img = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if img is None:
        raise DataError('Could not load image: {}'.format(path))
    return img.astype(np.float64) / 255.0


def encode_pfm(data):
    """
    (H, W, 3) or (H, W) floats -> PFM bytes

    Rows are stored bottom to top as the format requires.
    """
    data = np.asarray(data)
    if data.ndim == 3 and data.shape[2] == 3:
        kind = b'PF'
    elif data.ndim == 2:
        kind = b'Pf'
    else:
        raise DataError('PFM holds (H, W, 3) or (H, W) data, got {}'.format(data.shape))

    height, width = data.shape[:2]
    header = kind + b'\n' + '{} {}\n'.format(width, height).encode('ascii') + b'-1.0\n'
    body = np.ascontiguousarray(data[::-1], dtype='<f4').tobytes()
    return header + body


def decode_pfm(buf, name='PFM'):
    """ PFM bytes -> float64 array, (H, W, 3) for 'PF' and (H, W) for 'Pf' """
    parts = buf.split(b'\n', 3)
    if len(parts) != 4:
        raise DataError('{}: truncated header'.format(name))
    kind, dims, scale, body = parts

    if kind == b'PF':
        channels = 3
    elif kind == b'Pf':
        channels = 1
    else:
        raise DataError('{}: bad magic {!r}'.format(name, kind))

    try:
        width, height = [int(d) for d in dims.split()]
        scale = float(scale)
    except ValueError:
        raise DataError('{}: malformed header'.format(name))
    if width < 1 or height < 1 or scale == 0:
        raise DataError('{}: malformed header'.format(name))

    dtype = '<f4' if scale < 0 else '>f4'
    expected = width * height * channels * 4
    if len(body) != expected:
        raise DataError('{}: expected {} data bytes for {}x{}x{}, got {}'.format(
            name, expected, width, height, channels, len(body)))

    data = np.frombuffer(body, dtype=dtype).astype(np.float64)
    shape = (height, width, channels) if channels == 3 else (height, width)
    return data.reshape(shape)[::-1].copy()


def save_pfm(data, path):
    atomic_write_bytes(path, encode_pfm(data))


def load_pfm(path):
    with open(path, 'rb') as f:
        return decode_pfm(f.read(), name=str(path))


def load_image(path):
    """ PNG or PFM by extension, as an ImageBuf """
    if str(path).lower().endswith('.pfm'):
        return as_image(load_pfm(path), name=str(path), max_value=None)
    return load_png(path)
