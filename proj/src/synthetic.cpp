#include "tsgraph/synthetic.hpp"

#include "tsgraph/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace tsg {

std::vector<SignalRecording> generate_synthetic_dataset(int class_count, std::size_t per_class,
                                                        std::size_t length, std::uint64_t seed) {
    using F = SyntheticFamily;
    if (class_count < 2) throw ArgumentError("synthetic dataset needs at least 2 classes");
    if (length == 0) throw ArgumentError("synthetic recording length must be positive");
    const double nyquist = F::kSampleRateHz / 2;
    if (F::dominant_frequency(class_count - 1) * (1 + F::kFrequencyJitter) >= nyquist) {
        throw ArgumentError("too many classes for the synthetic frequency ladder");
    }

    constexpr double two_pi = 2 * std::numbers::pi;
    std::vector<SignalRecording> out;
    out.reserve(static_cast<std::size_t>(class_count) * per_class);
    for (int label = 0; label < class_count; ++label) {
        for (std::size_t idx = 0; idx < per_class; ++idx) {
            std::seed_seq seq{seed, static_cast<std::uint64_t>(label), static_cast<std::uint64_t>(idx)};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::normal_distribution<double> noise(0.0, F::kNoiseSigma);

            const double freq =
                F::dominant_frequency(label) * (1 + F::kFrequencyJitter * (2 * unit(rng) - 1));
            const double phase = two_pi * unit(rng);
            const double phase2 = two_pi * unit(rng);
            const double impulse_period = F::kSampleRateHz / F::kImpulseRateHz;
            const double impulse_offset = impulse_period * unit(rng);
            const double amp = F::kImpulseAmplitudeStep * label;

            std::vector<double> x(length);
            for (std::size_t t = 0; t < length; ++t) {
                const double tt = static_cast<double>(t) / F::kSampleRateHz;
                double v = std::sin(two_pi * freq * tt + phase) +
                           F::kHarmonicAmplitude * std::sin(2 * two_pi * freq * tt + phase2);
                if (amp > 0) {
                    // time since the most recent impulse
                    double since = std::fmod(static_cast<double>(t) - impulse_offset + impulse_period,
                                             impulse_period);
                    v += amp * std::exp(-since / F::kImpulseDecaySamples) *
                         std::sin(two_pi * F::kResonanceHz * since / F::kSampleRateHz);
                }
                // binary32 so in-memory data matches what the TSG1 writer stores
                x[t] = static_cast<float>(v + noise(rng));
            }

            SignalRecording rec;
            rec.channels.push_back(std::move(x));
            rec.sample_rate_hz = F::kSampleRateHz;
            rec.label = label;
            rec.source_id = "synthetic_c" + std::to_string(label) + "_" + std::to_string(idx);
            out.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace tsg
