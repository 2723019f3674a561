#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rss_sentry {

// Unknown parameter set of the sampled received-power sinusoid
//   x[k] = A cos(2 pi f Ts k + phi) + B + v[k].
// Frequency is stored in Hz and converted to omega = 2 pi f at math
// boundaries; phase is kept normalized into [0, 2pi).
struct SineParams {
    double amplitude_db = 0.0;   // A
    double dc_offset_db = 0.0;   // B, distance from nearest quantizer threshold
    double frequency_hz = 0.0;   // f
    double phase_rad = 0.0;      // phi

    SineParams normalized() const;          // phase wrapped into [0, 2pi)
    void validate() const;                  // throws DomainError
    void validate_against_rate(double sample_rate_hz) const;  // aliasing guard
};

struct AcquisitionSpec {
    double sample_rate_hz = 0.0;  // fs, Ts = 1/fs
    std::uint64_t num_samples = 0;
    double noise_std_db = 0.0;    // sigma of the white Gaussian v[k]
    std::uint64_t rng_seed = 0;

    double sample_period_s() const { return 1.0 / sample_rate_hz; }
    void validate() const;
};

enum class QuantizerMode { OneBit, Uniform };

struct QuantizerSpec {
    QuantizerMode mode = QuantizerMode::OneBit;
    double step_db = 1.0;       // Delta (uniform mode)
    double threshold_db = 0.0;  // zeta (one-bit mode)

    void validate() const;
};

enum class TraceKind { Continuous, OneBit, UniformQuantized };

// Time-indexed received-power samples plus provenance. Synthetic traces
// remember their generating parameters; ingested traces carry a source tag.
struct RssTrace {
    TraceKind kind = TraceKind::Continuous;
    double sample_rate_hz = 0.0;
    double one_bit_threshold_db = 0.0;  // zeta used when kind == OneBit
    std::vector<double> times_s;   // sample instants, uniformly spaced
    std::vector<double> values;    // x[k] (dB) or quantized y[k]

    bool synthetic = false;
    SineParams origin_params;      // valid when synthetic
    AcquisitionSpec origin_acq;    // valid when synthetic
    std::string source;            // path or descriptor when ingested

    std::size_t size() const { return values.size(); }
};

// Eq.-(7)-style synthesis: N samples of sinusoid + DC + white Gaussian
// noise. Deterministic for a given rng_seed.
RssTrace synthesize(const SineParams& params, const AcquisitionSpec& acq);

// sign(x - zeta) with sign(0) = +1; output values in {-1, +1}.
RssTrace quantize_one_bit(const RssTrace& trace, const QuantizerSpec& quant);

// Mid-tread uniform quantizer y = step * round(x/step), ties away from zero.
RssTrace quantize_uniform(const RssTrace& trace, const QuantizerSpec& quant);

}  // namespace rss_sentry
