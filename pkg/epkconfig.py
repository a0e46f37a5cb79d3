from entropik.config import Config

config = Config(max_order=4, trials=100, depth=3, workers=4)
