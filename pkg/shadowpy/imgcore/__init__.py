from shadowpy.imgcore.image import *
from shadowpy.imgcore.crop import FACE_SIZE, FaceCrop, load_crops, resize_crop_face
from shadowpy.imgcore.landmarks import *
from shadowpy.imgcore.io import *
