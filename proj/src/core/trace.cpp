#include "trace.hpp"

#include <cmath>

#include "constants.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace rss_sentry {

SineParams SineParams::normalized() const {
    SineParams p = *this;
    p.phase_rad = std::fmod(p.phase_rad, kTwoPi);
    if (p.phase_rad < 0.0) p.phase_rad += kTwoPi;
    return p;
}

void SineParams::validate() const {
    if (!std::isfinite(amplitude_db) || !std::isfinite(dc_offset_db) ||
        !std::isfinite(frequency_hz) || !std::isfinite(phase_rad)) {
        throw DomainError("sine parameters must be finite");
    }
    if (amplitude_db < 0.0) throw DomainError("amplitude A must be >= 0");
    if (frequency_hz < 0.0) throw DomainError("frequency must be >= 0");
}

void SineParams::validate_against_rate(double sample_rate_hz) const {
    validate();
    if (!(frequency_hz < 0.5 * sample_rate_hz)) {
        throw DomainError("frequency >= fs/2 would alias");
    }
}

void AcquisitionSpec::validate() const {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw DomainError("sample rate must be > 0");
    }
    if (num_samples < 2) throw DomainError("need at least 2 samples");
    if (!(noise_std_db >= 0.0) || !std::isfinite(noise_std_db)) {
        throw DomainError("noise std must be >= 0");
    }
}

void QuantizerSpec::validate() const {
    if (mode == QuantizerMode::Uniform && !(step_db > 0.0)) {
        throw DomainError("quantizer step must be > 0");
    }
    if (!std::isfinite(threshold_db)) throw DomainError("threshold must be finite");
}

RssTrace synthesize(const SineParams& params, const AcquisitionSpec& acq) {
    acq.validate();
    params.validate_against_rate(acq.sample_rate_hz);

    const SineParams p = params.normalized();
    const double w_ts = kTwoPi * p.frequency_hz / acq.sample_rate_hz;

    RssTrace trace;
    trace.kind = TraceKind::Continuous;
    trace.sample_rate_hz = acq.sample_rate_hz;
    trace.synthetic = true;
    trace.origin_params = p;
    trace.origin_acq = acq;
    trace.values.resize(acq.num_samples);
    trace.times_s.resize(acq.num_samples);

    Rng rng(acq.rng_seed);
    for (std::uint64_t k = 0; k < acq.num_samples; ++k) {
        double x = p.amplitude_db * std::cos(w_ts * static_cast<double>(k) + p.phase_rad) +
                   p.dc_offset_db;
        if (acq.noise_std_db > 0.0) x += acq.noise_std_db * rng.gaussian();
        trace.values[k] = x;
        trace.times_s[k] = static_cast<double>(k) / acq.sample_rate_hz;
    }
    return trace;
}

RssTrace quantize_one_bit(const RssTrace& trace, const QuantizerSpec& quant) {
    quant.validate();
    if (trace.kind != TraceKind::Continuous) {
        throw DomainError("one-bit quantizer expects a continuous trace");
    }
    RssTrace out = trace;
    out.kind = TraceKind::OneBit;
    out.one_bit_threshold_db = quant.threshold_db;
    for (auto& v : out.values) {
        v = (v >= quant.threshold_db) ? 1.0 : -1.0;  // sign(0) = +1
    }
    return out;
}

RssTrace quantize_uniform(const RssTrace& trace, const QuantizerSpec& quant) {
    if (!(quant.step_db > 0.0)) throw DomainError("quantizer step must be > 0");
    if (trace.kind != TraceKind::Continuous) {
        throw DomainError("uniform quantizer expects a continuous trace");
    }
    RssTrace out = trace;
    out.kind = TraceKind::UniformQuantized;
    for (auto& v : out.values) {
        // std::round ties away from zero, matching integer-dBm RSS reporting.
        v = quant.step_db * std::round(v / quant.step_db);
    }
    return out;
}

}  // namespace rss_sentry
