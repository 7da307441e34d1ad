from .model import EncoderParams

__all__ = ["EncoderParams"]
