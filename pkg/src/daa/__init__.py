"""Forensic audio analysis workbench.

A numpy/scipy library plus CLI (``daa``) and REST service covering:

* WAV decode/encode, resampling, synthesis (:mod:`daa.audio`)
* classical DSP feature extraction (:mod:`daa.features`)
* speech-evaluation metrics: WER/CER, SNR/SDR/SI-SNR/SI-SDR, STOI
  (:mod:`daa.metrics`)
* a processor registry with built-in baselines and an external adapter
  protocol (:mod:`daa.processors`)
* declarative, shareable analysis pipelines (:mod:`daa.pipeline`)
"""

__version__ = "0.1.0"

ENGINE_VERSION = __version__
