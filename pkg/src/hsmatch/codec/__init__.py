from .aux import AuxPayload, deserialize_aux, serialize_aux
from .bitstream import BitReader, BitWriter, crc16
from .embed import (METHODS, OPTIMIZED, TRADITIONAL, EmbedConfig, LSBPool, MarkedImage,
                    UnitRecord, embed_layer, embed_unit, extract_layer, extract_unit,
                    key_fingerprint, map_errors, multi_layer_embed, multi_layer_extract,
                    preprocess_boundaries, restore_boundaries, unmap_errors)
