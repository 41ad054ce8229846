#pragma once

// Deterministic stand-in for bearing vibration recordings.
//
// Class k is a parametric family sampled at 12 kHz:
//   - a tone at f_k = 500 + 450 k Hz (per-recording jitter of +/-1%, random
//     phase) with a 0.3-amplitude second harmonic;
//   - a train of impulses at 105 Hz ringing a 3 kHz resonance (decay constant
//     40 samples) with amplitude 0.4 k, so class 0 ("normal") has none;
//   - additive Gaussian noise with standard deviation 0.25.

#include "tsgraph/signal_io.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tsg {

struct SyntheticFamily {
    static constexpr double kSampleRateHz = 12000.0;
    static constexpr double kBaseFrequencyHz = 500.0;
    static constexpr double kFrequencyGapHz = 450.0;
    static constexpr double kFrequencyJitter = 0.01;
    static constexpr double kHarmonicAmplitude = 0.3;
    static constexpr double kImpulseRateHz = 105.0;
    static constexpr double kResonanceHz = 3000.0;
    static constexpr double kImpulseDecaySamples = 40.0;
    static constexpr double kImpulseAmplitudeStep = 0.4;
    static constexpr double kNoiseSigma = 0.25;

    static double dominant_frequency(int label) { return kBaseFrequencyHz + kFrequencyGapHz * label; }
};

/// Recordings ordered by class, then index; labels 0..class_count-1.
std::vector<SignalRecording> generate_synthetic_dataset(int class_count, std::size_t per_class,
                                                        std::size_t length, std::uint64_t seed);

}  // namespace tsg
