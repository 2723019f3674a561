#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "constants.hpp"
#include "errors.hpp"
#include "trace.hpp"
#include "trace_io.hpp"

using namespace rss_sentry;

namespace {

SineParams sine(double a, double b, double f, double phase = 0.0) {
    SineParams p;
    p.amplitude_db = a;
    p.dc_offset_db = b;
    p.frequency_hz = f;
    p.phase_rad = phase;
    return p;
}

AcquisitionSpec acquisition(double fs, std::uint64_t n, double sigma, std::uint64_t seed = 0) {
    AcquisitionSpec a;
    a.sample_rate_hz = fs;
    a.num_samples = n;
    a.noise_std_db = sigma;
    a.rng_seed = seed;
    return a;
}

RssTrace make_trace(std::initializer_list<double> values, double fs = 100.0) {
    RssTrace t;
    t.kind = TraceKind::Continuous;
    t.sample_rate_hz = fs;
    std::size_t k = 0;
    for (double v : values) {
        t.values.push_back(v);
        t.times_s.push_back(static_cast<double>(k++) / fs);
    }
    return t;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/rss_sentry_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("synthesize: noiseless DC") {
    const RssTrace t = synthesize(sine(0.0, -0.3, 10.0), acquisition(400.0, 16, 0.0));
    for (double v : t.values) CHECK(v == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("synthesize: quarter-period sampling walks 1,0,-1,0") {
    const RssTrace t = synthesize(sine(1.0, 0.0, 100.0), acquisition(400.0, 12, 0.0));
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double expected = (k % 4 == 0) ? 1.0 : (k % 4 == 2) ? -1.0 : 0.0;
        CHECK(t.values[k] == doctest::Approx(expected).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("synthesize: aliasing guard and invariants") {
    CHECK_THROWS_AS(synthesize(sine(1.0, 0.0, 200.0), acquisition(400.0, 8, 0.0)), DomainError);
    CHECK_THROWS_AS(synthesize(sine(-1.0, 0.0, 10.0), acquisition(400.0, 8, 0.0)), DomainError);
    CHECK_THROWS_AS(synthesize(sine(1.0, 0.0, 10.0), acquisition(400.0, 1, 0.0)), DomainError);
}

TEST_CASE("synthesize: determinism in the seed") {
    const auto a = synthesize(sine(0.025, 0.1, 100.0), acquisition(400.0, 256, 0.25, 99));
    const auto b = synthesize(sine(0.025, 0.1, 100.0), acquisition(400.0, 256, 0.25, 99));
    const auto c = synthesize(sine(0.025, 0.1, 100.0), acquisition(400.0, 256, 0.25, 100));
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("synthesize: moment oracle at one million samples") {
    const double amp = 0.025, dc = 0.1, sigma = 0.25;
    const RssTrace t = synthesize(sine(amp, dc, 100.0), acquisition(400.0, 1000000, sigma, 5));
    double mean = 0.0;
    for (double v : t.values) mean += v;
    mean /= static_cast<double>(t.size());
    CHECK(std::fabs(mean - dc) < 3.0 * sigma / std::sqrt(static_cast<double>(t.size())));

    double var = 0.0;
    for (double v : t.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t.size());
    const double expected_var = amp * amp / 2.0 + sigma * sigma;
    CHECK(std::fabs(var - expected_var) / expected_var < 0.05);
}

TEST_CASE("one-bit quantizer: sign convention with tie at threshold") {
    QuantizerSpec q;
    q.mode = QuantizerMode::OneBit;
    q.threshold_db = 0.0;
    const RssTrace out = quantize_one_bit(make_trace({0.3, -0.1, 0.0}), q);
    CHECK(out.values[0] == 1.0);
    CHECK(out.values[1] == -1.0);
    CHECK(out.values[2] == 1.0);  // sign(0) = +1
    CHECK(out.kind == TraceKind::OneBit);
}

TEST_CASE("one-bit quantizer: constant below threshold is all -1") {
    QuantizerSpec q;
    q.mode = QuantizerMode::OneBit;
    q.threshold_db = 0.5;
    const RssTrace out = quantize_one_bit(make_trace({0.2, 0.2, 0.2, 0.2}), q);
    for (double v : out.values) CHECK(v == -1.0);
}

TEST_CASE("one-bit quantizer: strong sine becomes a square wave at f") {
    const RssTrace cont = synthesize(sine(1.0, 0.0, 100.0), acquisition(400.0, 64, 0.0));
    QuantizerSpec q;
    q.mode = QuantizerMode::OneBit;
    const RssTrace out = quantize_one_bit(cont, q);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double x = std::cos(kTwoPi * 100.0 / 400.0 * static_cast<double>(k));
        CHECK(out.values[k] == (x >= 0.0 ? 1.0 : -1.0));
    }
    CHECK_THROWS_AS(quantize_one_bit(out, q), DomainError);  // already quantized
}

TEST_CASE("uniform quantizer: mid-tread with ties away from zero") {
    QuantizerSpec q;
    q.mode = QuantizerMode::Uniform;
    q.step_db = 1.0;
    const RssTrace out = quantize_uniform(make_trace({-45.4, -45.5, 45.5, 0.49, -0.5}), q);
    CHECK(out.values[0] == -45.0);
    CHECK(out.values[1] == -46.0);
    CHECK(out.values[2] == 46.0);
    CHECK(out.values[3] == 0.0);
    CHECK(out.values[4] == -1.0);
    QuantizerSpec bad;
    bad.mode = QuantizerMode::Uniform;
    bad.step_db = 0.0;
    CHECK_THROWS_AS(quantize_uniform(make_trace({1.0, 2.0}), bad), DomainError);
}

TEST_CASE("uniform quantizer: occupancy of the lower level grows with noise") {
    // Borderline DC regime: more dither pushes more samples across.
    QuantizerSpec q;
    q.mode = QuantizerMode::Uniform;
    q.step_db = 1.0;
    double prev_fraction = -1.0;
    for (double sigma : {0.05, 0.15, 0.3}) {
        const RssTrace cont =
            synthesize(sine(0.05, -45.49, 100.0), acquisition(400.0, 20000, sigma, 31));
        const RssTrace out = quantize_uniform(cont, q);
        std::size_t low = 0;
        for (double v : out.values) {
            if (v == -46.0) ++low;
        }
        const double fraction = static_cast<double>(low) / static_cast<double>(out.size());
        CHECK(fraction > prev_fraction);
        prev_fraction = fraction;
    }
}

TEST_CASE("property: far-from-threshold traces quantize to a constant") {
    QuantizerSpec q;
    q.mode = QuantizerMode::Uniform;
    q.step_db = 4.0;
    // Span A + 4*sigma = 0.22, well inside half a step from the level center.
    const RssTrace cont = synthesize(sine(0.02, 8.3, 100.0), acquisition(400.0, 4000, 0.05, 17));
    const RssTrace out = quantize_uniform(cont, q);
    std::set<double> levels(out.values.begin(), out.values.end());
    CHECK(levels.size() == 1);
    CHECK(*levels.begin() == 8.0);
}

TEST_CASE("property: near-threshold traces occupy at most two adjacent levels") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        QuantizerSpec q;
        q.mode = QuantizerMode::Uniform;
        q.step_db = 1.0;
        const RssTrace cont =
            synthesize(sine(0.03, 0.5, 100.0), acquisition(400.0, 4000, 0.05, seed));
        const RssTrace out = quantize_uniform(cont, q);
        std::set<double> levels(out.values.begin(), out.values.end());
        CHECK(levels.size() <= 2);
        if (levels.size() == 2) {
            CHECK(*levels.rbegin() - *levels.begin() == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("property: two-level uniform output maps affinely onto one-bit output") {
    QuantizerSpec uq;
    uq.mode = QuantizerMode::Uniform;
    uq.step_db = 1.0;
    QuantizerSpec bq;
    bq.mode = QuantizerMode::OneBit;
    bq.threshold_db = 0.5;  // shared boundary of levels 0 and 1

    const RssTrace cont = synthesize(sine(0.04, 0.5, 100.0), acquisition(400.0, 4000, 0.08, 3));
    const RssTrace uniform = quantize_uniform(cont, uq);
    const RssTrace onebit = quantize_one_bit(cont, bq);
    for (std::size_t k = 0; k < cont.size(); ++k) {
        // levels {0,1} <-> {-1,+1}: y = 2*level - 1
        CHECK(onebit.values[k] == doctest::Approx(2.0 * uniform.values[k] - 1.0));
    }
}

TEST_CASE("trace io: export -> ingest round trip is bit-exact") {
    TempFile file("roundtrip.csv");
    const RssTrace t = synthesize(sine(0.025, -45.2, 100.0), acquisition(400.0, 512, 0.25, 9));
    export_trace(t, file.path);
    const RssTrace back = ingest_trace(file.path, TraceFormat::CsvRss);
    CHECK(back.values == t.values);
    CHECK(back.times_s == t.times_s);

    TempFile file2("roundtrip2.csv");
    export_trace(back, file2.path);
    std::ifstream a(file.path), b(file2.path);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("trace io: header-only file is an empty-trace error") {
    TempFile file("empty.csv");
    std::ofstream(file.path) << "t_s,rss_db\n";
    CHECK_THROWS_WITH_AS(ingest_trace(file.path, TraceFormat::CsvRss),
                         doctest::Contains("EmptyTrace"), IoError);
}

TEST_CASE("trace io: csv-kv accepts a t_s,rss_dbm header at 2 kHz") {
    TempFile file("kv.csv");
    {
        std::ofstream out(file.path);
        out << "t_s,rss_dbm\n";
        for (int k = 0; k < 64; ++k) out << format_double(k * 5e-4) << ",-45.1\n";
    }
    const RssTrace t = ingest_trace(file.path, TraceFormat::CsvKv);
    CHECK(std::fabs(t.sample_rate_hz - 2000.0) / 2000.0 < 1e-3);
    CHECK(t.size() == 64);
    // Strict csv-rss rejects the nonstandard header.
    CHECK_THROWS_AS(ingest_trace(file.path, TraceFormat::CsvRss), IoError);
}

TEST_CASE("trace io: jitter handling") {
    TempFile file("jitter.csv");
    {
        std::ofstream out(file.path);
        out << "t_s,rss_db\n";
        for (int k = 0; k < 32; ++k) {
            const double jitter = (k % 2 == 0) ? 2e-5 : -2e-5;  // 0.8% of Ts
            out << format_double(k * 2.5e-3 + jitter) << ",1.5\n";
        }
    }
    const RssTrace t = ingest_trace(file.path, TraceFormat::CsvRss);
    for (std::size_t k = 1; k < t.size(); ++k) {
        CHECK(t.times_s[k] - t.times_s[k - 1] ==
              doctest::Approx(t.times_s[1] - t.times_s[0]).epsilon(1e-12));
    }

    TempFile bad("jitter_bad.csv");
    {
        std::ofstream out(bad.path);
        out << "t_s,rss_db\n";
        for (int k = 0; k < 32; ++k) {
            const double jitter = (k % 2 == 0) ? 4e-4 : -4e-4;  // 16% of Ts
            out << format_double(k * 2.5e-3 + jitter) << ",1.5\n";
        }
    }
    CHECK_THROWS_AS(ingest_trace(bad.path, TraceFormat::CsvRss), IoError);
}

TEST_CASE("trace io: missing file and bad format names") {
    CHECK_THROWS_AS(ingest_trace("/nonexistent/nope.csv", TraceFormat::CsvRss), IoError);
    CHECK_THROWS_AS(parse_trace_format("csv-bogus"), DomainError);
}
