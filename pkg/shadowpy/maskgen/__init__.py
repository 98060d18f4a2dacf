from shadowpy.maskgen.perlin import (
    PerlinSpec, gradient_noise, normalize_field, octave_amplitudes, perlin_field,
    perlin_octaves, sample_perlin_mask, sample_perlin_spec)
from shadowpy.maskgen.silhouette import (
    SilhouetteSpec, load_silhouette_corpus, make_synthetic_silhouettes,
    sample_silhouette_spec, silhouette_mask)
from shadowpy.maskgen.register import (
    make_mask, mask_register, sample_input_mask, sample_mask_source)
