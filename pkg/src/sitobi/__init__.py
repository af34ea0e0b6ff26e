"""Batch prosody annotation toolkit.

Aligns phone transcriptions to audio with monophone models, then
derives syllable, word, break-index, intensity, and pitch-contour
tiers, serialized as TextGrid and .lab files.
"""

from .audio import AudioBuffer, FrameSequence, FrameSpec, frame_signal, load_audio
from .config import Config, load_config, save_config
from .document import AnnotationDocument
from .errors import (
    AlignmentError,
    AudioError,
    ConfigError,
    DocumentError,
    FormatError,
    InventoryError,
    LangIdError,
    ModelError,
    PipelineError,
    PitchError,
    ProsodyError,
    SitobiError,
    SyllabificationError,
    VowellessWordError,
)
from .features import (
    EnergyTrack,
    FeatureConfig,
    compute_features,
    energy_track,
    normalize_energy,
    short_term_energy,
    spectral_flatness,
)
from .hmm import (
    DiagonalGmm,
    ModelSet,
    MonophoneModel,
    load_model_set,
    save_model_set,
)
from .aligner import (
    AlignmentResult,
    CorpusUtterance,
    SeedUtterance,
    force_align,
    iterative_refine,
    train_seed_models,
)
from .langid import (
    ContourFrequencyTable,
    LanguageScore,
    build_frequency_table,
    classify_word,
    load_table,
    save_table,
    score_word,
)
from .labfile import read_lab, write_lab
from .phones import (
    Phone,
    PhoneInventory,
    PhoneMapping,
    load_inventory,
    load_mapping,
    map_phones,
    save_inventory,
    save_mapping,
)
from .pipeline import Transcription, annotate, annotate_file, load_transcription
from .pitch import (
    ALL_LABELS,
    ContourLabel,
    GciSequence,
    PitchTrack,
    SmoothedContour,
    classify_contour,
    detect_gcis,
    f0_from_gcis,
    smooth_syllable_contour,
)
from .prosody import (
    SilenceRun,
    assign_break_indices,
    compute_rii,
    detect_silences,
    rii_bin,
)
from .segments import (
    BreakIndex,
    PhonemeSegment,
    SyllableSegment,
    WordSegment,
    quantize_time,
)
from .syllabify import derive_word_boundaries, syllabify
from .evaluate import (
    EvaluationReport,
    evaluate_breaks,
    evaluate_pitch_labels,
    evaluate_segmentation,
    write_report,
)
from .textgrid import read_textgrid, write_textgrid

__version__ = "0.1.0"
