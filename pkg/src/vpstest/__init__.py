"""Spectral randomness tests: the variance-of-power-spectrum test and the DFT test family."""

from vpstest.bitseq import BitSequence, PmSequence, parse_bits, serialize_bits, to_pm1
from vpstest.dftt import (
    KIM,
    ORIGINAL,
    PARESCHI,
    DfttVariant,
    TestOutcome,
    count_below_threshold,
    dftt_pvalue,
)
from vpstest.generators import (
    GeneratorSpec,
    PeriodicDefect,
    aes_ctr_bits,
    inject_periodic,
    mt19937_bits,
)
from vpstest.secondlevel import (
    SecondLevelReport,
    meta_uniformity,
    proportion_test,
    second_level,
    uniformity_test,
)
from vpstest.spectral import SpectrumResult, dft_power, dft_power_direct
from vpstest.specialfns import chi2_sf, erfc
from vpstest.vtest import (
    VStatistic,
    moment_oracle,
    v_n_delta_oracle,
    v_n_full,
    v_tilde_canonical,
    v_tilde_full,
    vtest_pvalue,
)

__version__ = "0.1.0"
