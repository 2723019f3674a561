#include "trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "errors.hpp"

namespace rss_sentry {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

bool split_two(const std::string& line, std::string& first, std::string& second) {
    auto comma = line.find(',');
    if (comma == std::string::npos) return false;
    first = trim(line.substr(0, comma));
    second = trim(line.substr(comma + 1));
    return !first.empty() && !second.empty();
}

double parse_number(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IoError("line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    }
    return v;
}

}  // namespace

TraceFormat parse_trace_format(const std::string& name) {
    if (name == "csv-rss") return TraceFormat::CsvRss;
    if (name == "csv-kv") return TraceFormat::CsvKv;
    throw DomainError("unknown trace format '" + name + "' (expected csv-rss or csv-kv)");
}

RssTrace ingest_trace(const std::string& path, TraceFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw IoError("'" + path + "': empty file");
    std::string h1, h2;
    if (!split_two(line, h1, h2)) {
        throw IoError("'" + path + "': malformed header '" + line + "'");
    }
    if (format == TraceFormat::CsvRss && (h1 != "t_s" || h2 != "rss_db")) {
        throw IoError("'" + path + "': csv-rss requires header t_s,rss_db");
    }

    std::vector<double> times, values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::string a, b;
        if (!split_two(line, a, b)) {
            throw IoError("'" + path + "': line " + std::to_string(line_no) + " is not 'time,value'");
        }
        times.push_back(parse_number(a, line_no));
        values.push_back(parse_number(b, line_no));
    }
    if (values.empty()) throw IoError("'" + path + "': no samples (EmptyTrace)");
    if (values.size() < 2) throw IoError("'" + path + "': need at least 2 samples");

    // Span-based period estimate, then a 10%-of-Ts jitter gate.
    const double ts = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(ts > 0.0)) throw IoError("'" + path + "': timestamps not increasing");

    double max_jitter = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double ideal = times[0] + static_cast<double>(i) * ts;
        max_jitter = std::max(max_jitter, std::fabs(times[i] - ideal));
    }
    if (max_jitter >= 0.1 * ts) {
        throw IoError("'" + path + "': timestamp jitter " + std::to_string(max_jitter) +
                      " s exceeds 10% of the sample period " + std::to_string(ts) + " s");
    }
    if (max_jitter > 1e-9 * ts) {
        // Visibly jittered but within tolerance: snap onto the uniform grid.
        for (std::size_t i = 0; i < times.size(); ++i) {
            times[i] = times[0] + static_cast<double>(i) * ts;
        }
    }

    RssTrace trace;
    trace.kind = TraceKind::Continuous;
    trace.sample_rate_hz = 1.0 / ts;
    trace.times_s = std::move(times);
    trace.values = std::move(values);
    trace.synthetic = false;
    trace.source = path;

    // Ingested one-bit captures are recognized by their value set.
    bool one_bit = true;
    for (double v : trace.values) {
        if (v != 1.0 && v != -1.0) { one_bit = false; break; }
    }
    if (one_bit) trace.kind = TraceKind::OneBit;
    return trace;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void export_trace(const RssTrace& trace, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write '" + tmp + "'");
        out << "t_s,rss_db\n";
        for (std::size_t k = 0; k < trace.size(); ++k) {
            out << format_double(trace.times_s[k]) << ',' << format_double(trace.values[k]) << '\n';
        }
        if (!out) throw IoError("write failure on '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename temp file onto '" + path + "'");
    }
}

}  // namespace rss_sentry
