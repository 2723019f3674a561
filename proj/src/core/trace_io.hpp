#pragma once

#include <string>

#include "trace.hpp"

namespace rss_sentry {

enum class TraceFormat { CsvRss, CsvKv };

TraceFormat parse_trace_format(const std::string& name);  // "csv-rss" | "csv-kv"

// Parse a two-column time/value CSV into a trace.
//   csv-rss: strict header "t_s,rss_db".
//   csv-kv : any two-column header; first column is time in seconds,
//            second the power value (e.g. "t_s,rss_dbm").
// Timestamps must be uniform; jitter below 10% of the median period is
// snapped to the uniform grid, anything worse is an error.
RssTrace ingest_trace(const std::string& path, TraceFormat format);

// Write "t_s,rss_db" rows with shortest round-trippable decimals, so an
// export -> ingest cycle is bit-exact. Emits to a temp file and renames.
void export_trace(const RssTrace& trace, const std::string& path);

// Shortest decimal form of v that parses back to exactly v.
std::string format_double(double v);

}  // namespace rss_sentry
